//! Injections of finite metric spaces into `l_0`, into `l_p`, and into nested
//! ball chains, with an independent pair-by-pair verifier.
//!
//! The level construction: `g(x)` is the distance from `x` to its nearest
//! neighbour and `A_n = { x : 2^(1-n) > g(x) }`. Coordinate `n` of the image
//! of `x` is 0 on `A_n` and an injective positive label elsewhere. Note that
//! `A_n` shrinks as `n` grows, and is empty from some level `N` on, after
//! which every image has a constant (or geometric) tail.

mod ballchain;
mod seq;

pub use ballchain::{inside, BallChain};
pub use seq::{
    ell0_distance, ell0_distance_exact, ellp_distance, EllpConvention, EllpDistance, Scale,
    SeqEntry, SeqVector, Tail,
};

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::numeric::{
    dyadic_level, format_rational, pow2, rational_to_f64, serde_rational, Rational,
};

/// Whether `A_n` uses the strict comparison `2^(1-n) > g` or `2^(1-n) >= g`.
/// The two differ only for points whose gap is a power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelRule {
    #[default]
    Strict,
    Inclusive,
}

impl LevelRule {
    /// First level `n >= 1` outside the comparison, i.e. the least `n` with
    /// `2^(1-n) <= t` (strict) or `2^(1-n) < t` (inclusive).
    pub fn level(self, t: &Rational) -> u64 {
        let k = dyadic_level(t) as u64;
        match self {
            LevelRule::Strict => k,
            LevelRule::Inclusive if pow2(1 - k as i64) == *t => k + 1,
            LevelRule::Inclusive => k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelStructure {
    pub rule: LevelRule,
    /// Nearest-neighbour distance of each point; `None` in a one-point space.
    #[serde(with = "opt_rationals")]
    pub gaps: Vec<Option<Rational>>,
    /// `kappa(x, x)`: the first level at which `x` leaves `A_n`.
    pub kappa_self: Vec<u64>,
    /// `max kappa(x, x)`: every `A_n` with `n >= levels` is empty.
    pub levels: u64,
    pub warnings: Vec<String>,
}

mod opt_rationals {
    use super::Rational;
    use crate::numeric::serde_rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Option<Rational>], s: S) -> Result<S::Ok, S::Error> {
        let text: Vec<Option<String>> = v
            .iter()
            .map(|r| r.as_ref().map(crate::numeric::format_rational))
            .collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Option<Rational>>, D::Error> {
        use serde::de::Error as _;
        let values = Vec::<Option<serde_json::Value>>::deserialize(d)?;
        values
            .iter()
            .map(|v| {
                v.as_ref()
                    .map(|v| serde_rational::from_value(v).map_err(D::Error::custom))
                    .transpose()
            })
            .collect()
    }
}

impl LevelStructure {
    /// `kappa(x, y)`: the first level `n` with `2^(1-n) <= max(g(x), g(y))`
    /// (strict inequality under the inclusive rule).
    pub fn kappa(&self, x: usize, y: usize) -> u64 {
        match (&self.gaps[x], &self.gaps[y]) {
            (Some(a), Some(b)) => self.rule.level(a.max(b)),
            _ => 1,
        }
    }

    /// `x ∈ A_n`.
    pub fn in_level_set(&self, x: usize, n: u64) -> bool {
        n < self.kappa_self[x]
    }

    pub fn level_set(&self, n: u64) -> Vec<usize> {
        (0..self.kappa_self.len())
            .filter(|&x| self.in_level_set(x, n))
            .collect()
    }
}

pub fn build_level_structure(space: &FiniteMetricSpace, rule: LevelRule) -> LevelStructure {
    let n = space.size();
    let mut warnings = Vec::new();
    if n < 2 {
        warnings.push("a space with fewer than two points has a trivial injection".into());
    }
    let gaps: Vec<Option<Rational>> = (0..n)
        .map(|x| {
            (0..n)
                .filter(|&y| y != x)
                .map(|y| space.get(x, y).clone())
                .min()
        })
        .collect();
    let kappa_self: Vec<u64> = gaps
        .iter()
        .map(|g| g.as_ref().map_or(1, |g| rule.level(g)))
        .collect();
    let levels = kappa_self.iter().copied().max().unwrap_or(1);
    LevelStructure {
        rule,
        gaps,
        kappa_self,
        levels,
        warnings,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    Ell0,
    Ellp {
        #[serde(with = "serde_rational")]
        p: Rational,
    },
    BallChain {
        chain: BallChain,
    },
}

impl Target {
    pub fn label(&self) -> String {
        match self {
            Target::Ell0 => "ell0".into(),
            Target::Ellp { p } => format!("ellp:{}", format_rational(p)),
            Target::BallChain { chain } => format!("ballchain:{}", chain.label()),
        }
    }

    /// The modulus the construction guarantees.
    pub fn default_modulus(&self) -> Modulus {
        match self {
            Target::Ellp { p } if *p > Rational::one() => Modulus::Root { p: p.clone() },
            _ => Modulus::Identity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Image {
    Sequence(SeqVector),
    Real(#[serde(with = "serde_rational")] Rational),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionMap {
    pub target: Target,
    /// Distance matrix of the domain.
    #[serde(with = "serde_rational::matrix")]
    pub domain: Vec<Vec<Rational>>,
    pub images: Vec<Image>,
    pub levels: Option<LevelStructure>,
    pub warnings: Vec<String>,
}

/// An image distance, exact when the target allows it.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageDistance {
    pub exact: Option<Rational>,
    pub value: f64,
}

impl InjectionMap {
    pub fn image_distance(&self, i: usize, j: usize) -> Result<ImageDistance> {
        match (&self.target, &self.images[i], &self.images[j]) {
            (Target::Ell0, Image::Sequence(a), Image::Sequence(b)) => {
                if a.scale == Scale::Unit && b.scale == Scale::Unit {
                    let d = ell0_distance_exact(a, b)?;
                    Ok(ImageDistance {
                        value: rational_to_f64(&d),
                        exact: Some(d),
                    })
                } else {
                    Ok(ImageDistance {
                        exact: None,
                        value: ell0_distance(a, b)?,
                    })
                }
            }
            (Target::Ellp { p }, Image::Sequence(a), Image::Sequence(b)) => Ok(ImageDistance {
                exact: None,
                value: ellp_distance(a, b, p)?.value,
            }),
            (Target::BallChain { .. }, Image::Real(a), Image::Real(b)) => {
                let d = (a - b).abs();
                Ok(ImageDistance {
                    value: rational_to_f64(&d),
                    exact: Some(d),
                })
            }
            _ => Err(Error::InvalidArgument(format!(
                "image kinds do not match the target {}",
                self.target.label()
            ))),
        }
    }
}

fn check_domain(space: &FiniteMetricSpace) -> Result<()> {
    if space.size() == 0 {
        return Err(Error::TooFewPoints("the domain is empty".into()));
    }
    Ok(())
}

/// Levels below `levels` carry labels ranked within `Z \ A_n`; from `levels`
/// on every point is outside `A_n` and its label is its rank in `Z`.
fn level_images(
    space: &FiniteMetricSpace,
    levels: &LevelStructure,
    scale: Scale,
    label: impl Fn(u64) -> Rational,
) -> Result<Vec<Image>> {
    let n = space.size();
    let top = levels.levels;
    let mut entries: Vec<Vec<(u64, Rational)>> = vec![Vec::new(); n];
    for level in 1..top {
        let mut rank = 0u64;
        for (x, row) in entries.iter_mut().enumerate() {
            if !levels.in_level_set(x, level) {
                rank += 1;
                row.push((level, label(rank)));
            }
        }
    }
    entries
        .into_iter()
        .enumerate()
        .map(|(x, e)| {
            let tail = (n > 1).then(|| (top, label(x as u64 + 1)));
            SeqVector::new(scale.clone(), e, tail).map(Image::Sequence)
        })
        .collect()
}

/// Coordinates `0` on `A_n` and `h_n(x) = j` for the `j`-th point of
/// `Z \ A_n` in index order.
pub fn build_ell0_injection(space: &FiniteMetricSpace, rule: LevelRule) -> Result<InjectionMap> {
    check_domain(space)?;
    let levels = build_level_structure(space, rule);
    let images = level_images(space, &levels, Scale::Unit, |j| {
        Rational::from_integer(BigInt::from(j))
    })?;
    Ok(InjectionMap {
        target: Target::Ell0,
        domain: space.rows().to_vec(),
        images,
        warnings: levels.warnings.clone(),
        levels: Some(levels),
    })
}

/// As for `l_0`, but the `j`-th label at level `n` is
/// `2^(-n/p) (1 - 2^-j)`, inside `(0, 2^(-n/p))`.
pub fn build_ellp_injection(
    space: &FiniteMetricSpace,
    p: &Rational,
    rule: LevelRule,
) -> Result<InjectionMap> {
    if !p.is_positive() {
        return Err(Error::InvalidExponent {
            name: "p",
            value: p.to_string(),
            range: "(0, inf)",
        });
    }
    check_domain(space)?;
    let levels = build_level_structure(space, rule);
    let scale = Scale::Dyadic { p: p.clone() };
    let images = level_images(space, &levels, scale, |j| {
        Rational::one() - pow2(-(j as i64))
    })?;
    Ok(InjectionMap {
        target: Target::Ellp { p: p.clone() },
        domain: space.rows().to_vec(),
        images,
        warnings: levels.warnings.clone(),
        levels: Some(levels),
    })
}

/// Sends each `x` to an unused point of the ball `B_m` with `m` the first
/// index whose diameter is at most `g(x)`.
pub fn build_ballchain_injection(
    space: &FiniteMetricSpace,
    chain: &BallChain,
) -> Result<InjectionMap> {
    check_domain(space)?;
    chain.validate()?;
    let n = space.size();
    let levels = build_level_structure(space, LevelRule::Strict);
    let mut used = HashSet::new();
    let mut images = Vec::with_capacity(n);
    for gap in &levels.gaps {
        let m = match gap {
            Some(g) => chain.level_for(g).ok_or(Error::Capacity {
                ball: match chain {
                    BallChain::Explicit { diameters, .. } => diameters.len() + 1,
                    _ => usize::MAX,
                },
                needed: n,
            })?,
            None => 1,
        };
        if let Some(cap) = chain.capacity(m) {
            if cap < n as u64 {
                return Err(Error::Capacity {
                    ball: m as usize,
                    needed: n,
                });
            }
        }
        let point = (0u64..)
            .map_while(|j| chain.allocate(m, j))
            .find(|p| !used.contains(p))
            .ok_or(Error::Capacity {
                ball: m as usize,
                needed: n,
            })?;
        used.insert(point.clone());
        images.push(Image::Real(point));
    }
    Ok(InjectionMap {
        target: Target::BallChain {
            chain: chain.clone(),
        },
        domain: space.rows().to_vec(),
        images,
        warnings: levels.warnings.clone(),
        levels: Some(levels),
    })
}

/// Bound applied to domain distances: `t` or `t^(1/p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Modulus {
    Identity,
    Root {
        #[serde(with = "serde_rational")]
        p: Rational,
    },
}

impl Modulus {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "identity" => Ok(Modulus::Identity),
            t => {
                let p = t
                    .strip_prefix("root:")
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown modulus {t:?}")))?;
                let p = crate::numeric::parse_rational(p).map_err(Error::InvalidArgument)?;
                if !p.is_positive() {
                    return Err(Error::InvalidExponent {
                        name: "p",
                        value: p.to_string(),
                        range: "(0, inf)",
                    });
                }
                Ok(Modulus::Root { p })
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Modulus::Identity => "identity".into(),
            Modulus::Root { p } => format!("root:{}", format_rational(p)),
        }
    }

    pub fn apply(&self, t: &Rational) -> f64 {
        match self {
            Modulus::Identity => rational_to_f64(t),
            Modulus::Root { p } => rational_to_f64(t).powf(1.0 / rational_to_f64(p)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InjectionReport {
    pub target: String,
    pub modulus: String,
    pub points: usize,
    pub pairs_checked: u64,
    pub injective: bool,
    /// First pair (lexicographically) with equal images.
    pub collision: Option<(usize, usize)>,
    /// Largest `image distance / modulus(domain distance)`.
    pub worst_ratio: f64,
    pub worst_pair: Option<(usize, usize)>,
    /// First pair with ratio above `1 + tolerance`.
    pub violation: Option<(usize, usize)>,
    /// For exact targets under the identity modulus: `image <= domain` for
    /// every pair, decided in rational arithmetic.
    pub exact_lipschitz: Option<bool>,
    pub tolerance: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy)]
struct PairStat {
    worst: Option<(f64, usize, usize)>,
    collision: Option<(usize, usize)>,
    violation: Option<(usize, usize)>,
    exact_ok: bool,
    exact_seen: bool,
}

fn first(a: Option<(usize, usize)>, b: Option<(usize, usize)>) -> Option<(usize, usize)> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl PairStat {
    fn empty() -> Self {
        Self {
            worst: None,
            collision: None,
            violation: None,
            exact_ok: true,
            exact_seen: false,
        }
    }

    fn merge(self, o: Self) -> Self {
        let worst = match (self.worst, o.worst) {
            (Some(a), Some(b)) => {
                // Largest ratio; ties go to the lexicographically first pair.
                let better = b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2));
                Some(if better { b } else { a })
            }
            (a, None) => a,
            (None, b) => b,
        };
        Self {
            worst,
            collision: first(self.collision, o.collision),
            violation: first(self.violation, o.violation),
            exact_ok: self.exact_ok && o.exact_ok,
            exact_seen: self.exact_seen || o.exact_seen,
        }
    }
}

/// Checks every pair: images distinct, and image distance at most
/// `(1 + tolerance) * modulus(domain distance)`.
pub fn verify_injection(
    map: &InjectionMap,
    modulus: &Modulus,
    tolerance: f64,
) -> Result<InjectionReport> {
    let n = map.images.len();
    if map.domain.len() != n || map.domain.iter().any(|r| r.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            found: map.domain.len(),
        });
    }
    let rows: Vec<PairStat> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut stat = PairStat::empty();
            for j in i + 1..n {
                let mut local = PairStat::empty();
                if map.images[i] == map.images[j] {
                    local.collision = Some((i, j));
                }
                let image = map.image_distance(i, j)?;
                let domain = &map.domain[i][j];
                let bound = modulus.apply(domain);
                let ratio = if bound > 0.0 {
                    image.value / bound
                } else if image.value > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                };
                local.worst = Some((ratio, i, j));
                if ratio > 1.0 + tolerance {
                    local.violation = Some((i, j));
                }
                if let (Some(exact), Modulus::Identity) = (&image.exact, modulus) {
                    local.exact_seen = true;
                    local.exact_ok = exact <= domain;
                }
                stat = stat.merge(local);
            }
            Ok(stat)
        })
        .collect::<Result<Vec<_>>>()?;
    let stat = rows.into_iter().fold(PairStat::empty(), PairStat::merge);
    let exact_lipschitz = stat.exact_seen.then_some(stat.exact_ok);
    let injective = stat.collision.is_none();
    Ok(InjectionReport {
        target: map.target.label(),
        modulus: modulus.label(),
        points: n,
        pairs_checked: (n as u64) * (n as u64).saturating_sub(1) / 2,
        injective,
        collision: stat.collision,
        worst_ratio: stat.worst.map_or(0.0, |w| w.0),
        worst_pair: stat.worst.map(|w| (w.1, w.2)),
        violation: stat.violation,
        exact_lipschitz,
        tolerance,
        holds: injective && stat.violation.is_none() && exact_lipschitz != Some(false),
    })
}
