//! The disjoint union of the blocks `M_n` (n even), with the literal
//! cross-block distance `4^(m+n)` and the corrected one `m^m + n^n`.
//!
//! Points are stored sparsely: `M_8` already has `8^8` coordinates, and the
//! interesting points (zero, antipodes) have very few nonzero residues.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::metric::{Distance, DistanceOracle};
use crate::numeric::{serde_display, serde_rational, Rational};

/// Largest block whose residues fit in `u128` (`14^28 < 2^128`).
pub const ZBLOCK_LIMIT: u32 = 14;

/// Points with at most this many coordinates are written densely.
const DENSE_JSON_LIMIT: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZVariant {
    Literal,
    Corrected,
}

impl fmt::Display for ZVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZVariant::Literal => "literal",
            ZVariant::Corrected => "corrected",
        })
    }
}

fn check_block(n: u32) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidBlock(n));
    }
    if n > ZBLOCK_LIMIT {
        return Err(Error::BlockTooLarge { block: n });
    }
    Ok(())
}

/// `n^n`: coordinates of `M_n`, and quanta per real unit.
fn nn(n: u32) -> u128 {
    (n as u128).pow(n)
}

pub fn block_coords(n: u32) -> u64 {
    nn(n) as u64
}

pub fn block_units(n: u32) -> u128 {
    nn(n) * nn(n)
}

fn big_nn(n: u32) -> BigInt {
    num_traits::Pow::pow(BigInt::from(n), n)
}

/// Distance between distinct blocks `m` and `n`.
pub fn cross_distance(m: u32, n: u32, variant: ZVariant) -> BigInt {
    match variant {
        ZVariant::Literal => num_traits::Pow::pow(BigInt::from(4u32), m + n),
        ZVariant::Corrected => big_nn(m) + big_nn(n),
    }
}

/// `diam M_n = n^n / 2`.
pub fn diameter(n: u32) -> Rational {
    Rational::new(big_nn(n), BigInt::from(2))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZPoint {
    pub block: u32,
    /// Nonzero residues by coordinate index.
    nonzero: BTreeMap<u64, u128>,
}

impl ZPoint {
    pub fn zero(block: u32) -> Result<Self> {
        check_block(block)?;
        Ok(Self {
            block,
            nonzero: BTreeMap::new(),
        })
    }

    pub fn new(block: u32, residues: &[u128]) -> Result<Self> {
        check_block(block)?;
        if residues.len() as u64 != block_coords(block) {
            return Err(Error::LengthMismatch {
                expected: block_coords(block) as usize,
                found: residues.len(),
            });
        }
        Self::sparse(
            block,
            residues.iter().enumerate().map(|(i, &r)| (i as u64, r)),
        )
    }

    pub fn sparse(block: u32, entries: impl IntoIterator<Item = (u64, u128)>) -> Result<Self> {
        check_block(block)?;
        let (c, u) = (block_coords(block), block_units(block));
        let mut nonzero = BTreeMap::new();
        for (i, r) in entries {
            if i >= c {
                return Err(Error::InvalidArgument(format!(
                    "coordinate {i} out of range for M_{block} ({c} coordinates)"
                )));
            }
            if r >= u {
                return Err(Error::InvalidArgument(format!(
                    "residue {r} out of range for M_{block} ({u} units)"
                )));
            }
            if r != 0 {
                nonzero.insert(i, r);
            }
        }
        Ok(Self { block, nonzero })
    }

    pub fn residue(&self, i: u64) -> u128 {
        self.nonzero.get(&i).copied().unwrap_or(0)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (u64, u128)> + '_ {
        self.nonzero.iter().map(|(&i, &r)| (i, r))
    }

    /// Sup distance to `other` (same block) in quanta.
    fn quanta_to(&self, other: &ZPoint) -> u128 {
        let u = block_units(self.block);
        let cyc = |a: u128, b: u128| {
            let d = a.abs_diff(b);
            d.min(u - d)
        };
        self.nonzero
            .keys()
            .chain(other.nonzero.keys())
            .map(|&i| cyc(self.residue(i), other.residue(i)))
            .max()
            .unwrap_or(0)
    }
}

#[derive(Serialize, Deserialize)]
struct ZPointJson {
    block: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    residues: Option<Vec<u128>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nonzero: Option<Vec<(u64, u128)>>,
}

impl Serialize for ZPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let c = block_coords(self.block);
        let json = if c <= DENSE_JSON_LIMIT {
            ZPointJson {
                block: self.block,
                residues: Some((0..c).map(|i| self.residue(i)).collect()),
                nonzero: None,
            }
        } else {
            ZPointJson {
                block: self.block,
                residues: None,
                nonzero: Some(self.nonzero().collect()),
            }
        };
        json.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ZPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = ZPointJson::deserialize(d)?;
        let point = match (json.residues, json.nonzero) {
            (Some(r), None) => ZPoint::new(json.block, &r),
            (None, Some(nz)) => ZPoint::sparse(json.block, nz),
            (None, None) => ZPoint::zero(json.block),
            (Some(_), Some(_)) => {
                return Err(D::Error::custom(
                    "give either residues or nonzero, not both",
                ))
            }
        };
        point.map_err(D::Error::custom)
    }
}

/// `zeta(x, y)` in real units.
pub fn zeta(x: &ZPoint, y: &ZPoint, variant: ZVariant) -> Rational {
    if x.block == y.block {
        Rational::new(BigInt::from(x.quanta_to(y)), BigInt::from(nn(x.block)))
    } else {
        Rational::from_integer(cross_distance(x.block, y.block, variant))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// `x`, `y`, `z` in three different blocks.
    Cross,
    /// `x`, `y` antipodal in one block, `z` in another.
    WithinBlock,
}

/// A triple with `zeta(x, y) > zeta(x, z) + zeta(z, y)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZTriangle {
    pub kind: ViolationKind,
    pub x: ZPoint,
    pub y: ZPoint,
    pub z: ZPoint,
    #[serde(with = "serde_rational")]
    pub direct: Rational,
    #[serde(with = "serde_rational")]
    pub detour: Rational,
    /// `direct - detour`, positive for a violation.
    #[serde(with = "serde_rational")]
    pub slack: Rational,
}

impl ZTriangle {
    fn evaluate(kind: ViolationKind, x: ZPoint, y: ZPoint, z: ZPoint, variant: ZVariant) -> Self {
        let direct = zeta(&x, &y, variant);
        let detour = zeta(&x, &z, variant) + zeta(&z, &y, variant);
        let slack = &direct - &detour;
        Self {
            kind,
            x,
            y,
            z,
            direct,
            detour,
            slack,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZAudit {
    pub variant: ZVariant,
    pub block_bound: u32,
    /// Block-level configurations examined.
    pub checked: u64,
    pub violation_count: u64,
    /// Witnesses, one per violating block configuration.
    pub violations: Vec<ZTriangle>,
    /// No violation among blocks `<= block_bound`.
    pub certified: bool,
}

/// Checks the triangle inequality over every block configuration up to
/// `block_bound`.
///
/// Within-block positions only enter through the block diameters, so two
/// shapes cover everything: three distinct blocks (`D(a,b)` against
/// `D(a,c) + D(c,b)`), and two points of one block at distance `diam M_a` with
/// a detour through block `c` (`diam M_a` against `2 D(a,c)`). Each violating
/// shape is turned into explicit points and re-evaluated with `zeta`.
pub fn audit_triangles(variant: ZVariant, block_bound: u32) -> Result<ZAudit> {
    if block_bound < 2 {
        return Err(Error::InvalidArgument(
            "the block bound must be at least 2".into(),
        ));
    }
    let top = block_bound - block_bound % 2;
    if top > ZBLOCK_LIMIT {
        return Err(Error::BlockTooLarge { block: top });
    }
    let blocks: Vec<u32> = (2..=top).step_by(2).collect();
    let mut checked = 0u64;
    let mut violations = Vec::new();
    for &a in &blocks {
        for &b in blocks.iter().filter(|&&b| b > a) {
            for &c in blocks.iter().filter(|&&c| c != a && c != b) {
                checked += 1;
                let direct = cross_distance(a, b, variant);
                let detour = cross_distance(a, c, variant) + cross_distance(c, b, variant);
                if direct > detour {
                    violations.push(ZTriangle::evaluate(
                        ViolationKind::Cross,
                        ZPoint::zero(a)?,
                        ZPoint::zero(b)?,
                        ZPoint::zero(c)?,
                        variant,
                    ));
                }
            }
        }
    }
    for &a in &blocks {
        for &c in blocks.iter().filter(|&&c| c != a) {
            checked += 1;
            let detour = Rational::from_integer(BigInt::from(2) * cross_distance(a, c, variant));
            if diameter(a) > detour {
                let antipode = ZPoint::sparse(a, [(0, block_units(a) / 2)])?;
                violations.push(ZTriangle::evaluate(
                    ViolationKind::WithinBlock,
                    ZPoint::zero(a)?,
                    antipode,
                    ZPoint::zero(c)?,
                    variant,
                ));
            }
        }
    }
    debug_assert!(violations.iter().all(|v| v.slack > Rational::zero()));
    Ok(ZAudit {
        variant,
        block_bound,
        checked,
        violation_count: violations.len() as u64,
        certified: violations.is_empty(),
        violations,
    })
}

/// The first violation of the audit order: three distinct blocks by
/// increasing `(a, b)`, then within-block detours.
pub fn find_triangle_violation(variant: ZVariant, block_bound: u32) -> Result<Option<ZTriangle>> {
    Ok(audit_triangles(variant, block_bound)?
        .violations
        .into_iter()
        .next())
}

/// A finite set of points of the union, as a metric space in its own right.
#[derive(Debug, Clone, PartialEq)]
pub struct ZSample {
    pub variant: ZVariant,
    pub points: Vec<ZPoint>,
}

impl DistanceOracle for ZSample {
    type Point = ZPoint;

    fn distance(&self, a: &ZPoint, b: &ZPoint) -> Distance {
        Distance::Exact(zeta(a, b, self.variant))
    }

    fn points(&self) -> Option<Vec<ZPoint>> {
        Some(self.points.clone())
    }
}

/// Random sparse points in blocks `<= block_bound`: a few random coordinates,
/// with residues biased towards the antipode so that distances near the
/// diameter show up.
pub fn sample_points(block_bound: u32, count: usize, seed: u64) -> Result<Vec<ZPoint>> {
    let top = block_bound - block_bound % 2;
    check_block(top)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = std::collections::BTreeSet::new();
    let mut attempts = 0;
    while out.len() < count && attempts < 100 * count.max(1) {
        attempts += 1;
        let block = 2 * rng.gen_range(1..=top / 2);
        let (c, u) = (block_coords(block), block_units(block));
        let k = rng.gen_range(0..=3);
        let entries: Vec<(u64, u128)> = (0..k)
            .map(|_| {
                let i = rng.gen_range(0..c.min(8));
                let r = if rng.gen_bool(0.5) {
                    u / 2 - rng.gen_range(0..u.min(4))
                } else {
                    rng.gen_range(0..u)
                };
                (i, r)
            })
            .collect();
        out.insert(ZPoint::sparse(block, entries)?);
    }
    Ok(out.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockCount {
    /// `base^exponent` points.
    #[serde(with = "serde_display")]
    pub base: BigUint,
    pub exponent: u64,
    /// The exact value, when it has at most 2^20 bits.
    #[serde(serialize_with = "serialize_opt_display")]
    pub exact: Option<BigUint>,
    pub log2: f64,
}

fn serialize_opt_display<S: Serializer>(
    v: &Option<BigUint>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

const EXACT_BITS: u64 = 1 << 20;

fn log2_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        v.to_f64().unwrap_or(f64::INFINITY).log2()
    } else {
        let shift = bits - 64;
        (v >> shift).to_f64().unwrap_or(0.0).log2() + shift as f64
    }
}

impl BlockCount {
    fn power(base: BigUint, exponent: u64) -> Self {
        let log2 = if base.is_zero() {
            f64::NEG_INFINITY
        } else {
            exponent as f64 * log2_big(&base)
        };
        let exact = (base.bits().saturating_mul(exponent) <= EXACT_BITS)
            .then(|| num_traits::Pow::pow(&base, exponent));
        Self {
            base,
            exponent,
            exact,
            log2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockCensus {
    pub block: u32,
    /// Distance from the center's block, `None` for the center's own block.
    #[serde(serialize_with = "serialize_opt_display_int")]
    pub cross_distance: Option<BigInt>,
    pub count: BlockCount,
}

fn serialize_opt_display_int<S: Serializer>(
    v: &Option<BigInt>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallCensus {
    pub center: ZPoint,
    #[serde(with = "serde_rational")]
    pub radius: Rational,
    pub variant: ZVariant,
    pub blocks: Vec<BlockCensus>,
    #[serde(serialize_with = "serialize_opt_display")]
    pub total: Option<BigUint>,
    pub total_log2: f64,
}

/// Points of the union within `radius` of `center`.
///
/// In the center's block the ball is a product of cyclic intervals, one per
/// coordinate. Another block lies entirely inside the ball or entirely outside
/// it, depending only on the cross-block distance.
pub fn ball_census(center: &ZPoint, radius: &Rational, variant: ZVariant) -> Result<BallCensus> {
    if radius < &Rational::zero() {
        return Err(Error::InvalidArgument(
            "the radius must be non-negative".into(),
        ));
    }
    let own = center.block;
    let u = BigUint::from(block_units(own));
    let reach = (radius * Rational::from_integer(BigInt::from(nn(own))))
        .floor()
        .to_integer()
        .to_biguint()
        .unwrap_or_default();
    let per_coord = (reach * 2u32 + 1u32).min(u);
    let mut blocks = vec![BlockCensus {
        block: own,
        cross_distance: None,
        count: BlockCount::power(per_coord, block_coords(own)),
    }];
    let mut n = 2;
    loop {
        if n != own {
            let d = cross_distance(own, n, variant);
            if Rational::from_integer(d.clone()) > *radius {
                if n > own {
                    break;
                }
            } else {
                // Blocks beyond the residue limit are counted symbolically.
                let (coords, units) = (
                    num_traits::Pow::pow(BigUint::from(n), n),
                    num_traits::Pow::pow(BigUint::from(n), 2 * n),
                );
                let exponent = coords.to_u64().ok_or(Error::BlockTooLarge { block: n })?;
                blocks.push(BlockCensus {
                    block: n,
                    cross_distance: Some(d),
                    count: BlockCount::power(units, exponent),
                });
            }
        }
        n += 2;
    }
    blocks.sort_by_key(|b| b.block);
    let total = blocks
        .iter()
        .map(|b| b.count.exact.clone())
        .sum::<Option<BigUint>>();
    let max_log = blocks
        .iter()
        .map(|b| b.count.log2)
        .fold(f64::NEG_INFINITY, f64::max);
    let total_log2 = max_log
        + blocks
            .iter()
            .map(|b| (b.count.log2 - max_log).exp2())
            .sum::<f64>()
            .log2();
    Ok(BallCensus {
        center: center.clone(),
        radius: radius.clone(),
        variant,
        blocks,
        total,
        total_log2,
    })
}
