//! Finite metric spaces, the distance-oracle contract for implicit spaces,
//! metric-axiom auditing and the snowflake transform.

mod moduli;

pub use moduli::{empirical_moduli, ModulusEnvelope, ModulusSample, StepFunction};

use std::fmt::Debug;
use std::hash::Hash;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{
    exact_rational_power, format_rational, parse_rational, rational_from_f64, rational_to_f64,
    to_f64, HighPrecision, Numerics, Rational,
};

/// A distance value: an exact rational, or a rational raised to a rational
/// exponent (what snowflakes and Euclidean norms produce).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Distance {
    Exact(Rational),
    Power { base: Rational, exponent: Rational },
}

impl Distance {
    pub fn exact(value: Rational) -> Self {
        Distance::Exact(value)
    }

    pub fn from_integer(value: i64) -> Self {
        Distance::Exact(Rational::from_integer(BigInt::from(value)))
    }

    /// `base^exponent`, collapsed to an exact value whenever it is rational.
    pub fn power(base: Rational, exponent: Rational) -> Self {
        if exponent.is_one() {
            return Distance::Exact(base);
        }
        match exact_rational_power(&base, &exponent) {
            Some(v) => Distance::Exact(v),
            None => Distance::Power { base, exponent },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Distance::Exact(v) => v.is_zero(),
            Distance::Power { base, .. } => base.is_zero(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Distance::Exact(v) => v.is_negative(),
            Distance::Power { base, .. } => base.is_negative(),
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Distance::Exact(v) => Some(v),
            Distance::Power { .. } => None,
        }
    }

    /// `self^alpha`.
    pub fn raised(&self, alpha: &Rational) -> Distance {
        match self {
            Distance::Exact(v) => Distance::power(v.clone(), alpha.clone()),
            Distance::Power { base, exponent } => Distance::power(base.clone(), exponent * alpha),
        }
    }

    fn parts(&self) -> (Rational, Rational) {
        match self {
            Distance::Exact(v) => (v.clone(), Rational::one()),
            Distance::Power { base, exponent } => (base.clone(), exponent.clone()),
        }
    }

    pub fn to_big(&self, ctx: &mut HighPrecision) -> BigFloat {
        match self {
            Distance::Exact(v) => ctx.rational(v),
            Distance::Power { .. } => self.pow_big(1.0, ctx),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Distance::Exact(v) => rational_to_f64(v),
            Distance::Power { .. } => self.pow_f64(1.0),
        }
    }

    /// `d^p` in high precision, with `0^p = 0` for every `p` (including 0) and
    /// `d^0 = 1` for `d > 0`.
    pub fn pow_big(&self, p: f64, ctx: &mut HighPrecision) -> BigFloat {
        if self.is_zero() {
            return ctx.zero();
        }
        if p == 0.0 {
            return ctx.one();
        }
        let (base, exponent) = self.parts();
        if let Some(p_exact) = rational_from_f64(p) {
            let total = &exponent * &p_exact;
            if total.is_integer() {
                if let Some(k) = total.to_integer().to_i64() {
                    if k.unsigned_abs() <= 4096 {
                        let b = ctx.rational(&base);
                        let v = ctx.powi(&b, k.unsigned_abs());
                        return if k < 0 { ctx.div(&ctx.one(), &v) } else { v };
                    }
                }
            }
            let b = ctx.rational(&base);
            let e = ctx.rational(&total);
            return ctx.pow(&b, &e);
        }
        f64::NAN.into()
    }

    pub fn pow_f64(&self, p: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if p == 0.0 {
            return 1.0;
        }
        let (base, exponent) = self.parts();
        rational_to_f64(&base).powf(rational_to_f64(&exponent) * p)
    }
}

impl std::fmt::Display for Distance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Distance::Exact(v) => write!(f, "{}", format_rational(v)),
            Distance::Power { base, exponent } => {
                write!(
                    f,
                    "({})^({})",
                    format_rational(base),
                    format_rational(exponent)
                )
            }
        }
    }
}

impl Serialize for Distance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Distance-oracle contract for explicit and implicit metric spaces.
///
/// Implementations must be symmetric, non-negative and zero exactly on equal
/// handles. `triangle_guaranteed` declares whether the triangle inequality is
/// known to hold (the literal cross-block metric of the disjoint union does not).
pub trait DistanceOracle: Sync {
    type Point: Clone + Eq + Ord + Hash + Debug + Send + Sync + Serialize;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> Distance;

    /// Every point of the space, when the space is small enough to list.
    fn points(&self) -> Option<Vec<Self::Point>> {
        None
    }

    fn triangle_guaranteed(&self) -> bool {
        false
    }
}

impl<T: DistanceOracle + ?Sized> DistanceOracle for &T {
    type Point = T::Point;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> Distance {
        (**self).distance(a, b)
    }

    fn points(&self) -> Option<Vec<Self::Point>> {
        (**self).points()
    }

    fn triangle_guaranteed(&self) -> bool {
        (**self).triangle_guaranteed()
    }
}

/// Explicit finite space with an exact rational distance table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    dist: Vec<Vec<Rational>>,
    checked: bool,
}

impl FiniteMetricSpace {
    /// Builds a space after checking every metric axiom exactly.
    pub fn new(dist: Vec<Vec<Rational>>) -> Result<Self> {
        let space = Self::new_unchecked(dist)?;
        let report = validate_metric(&space, u64::MAX, 0, &Numerics::default())?;
        if let Some(reason) = report.first_failure() {
            return Err(Error::NotAMetric(reason));
        }
        Ok(Self {
            checked: true,
            ..space
        })
    }

    /// Builds a space without the axiom checks; only the table shape is
    /// validated. Used for deliberately non-metric data.
    pub fn new_unchecked(dist: Vec<Vec<Rational>>) -> Result<Self> {
        let n = dist.len();
        for row in &dist {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
        }
        Ok(Self {
            dist,
            checked: false,
        })
    }

    /// Builds the table from a distance function over `0..n`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Result<Self> {
        let dist = (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect();
        Self::new(dist)
    }

    pub fn size(&self) -> usize {
        self.dist.len()
    }

    pub fn is_checked(&self) -> bool {
        self.checked
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    /// Parses the matrix format: first line `n`, then `n` rows of `n` numbers
    /// (`a/b`, integers or decimals) separated by whitespace or commas.
    pub fn from_csv(text: &str) -> Result<Self> {
        Self::new(parse_matrix(text)?)
    }

    /// As [`from_csv`](Self::from_csv), without the metric axioms.
    pub fn from_csv_unchecked(text: &str) -> Result<Self> {
        Self::new_unchecked(parse_matrix(text)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", self.size());
        for row in &self.dist {
            let cells: Vec<String> = row.iter().map(format_rational).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

fn parse_matrix(text: &str) -> Result<Vec<Vec<Rational>>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (first_no, first) = lines.next().ok_or(Error::Parse {
        line: 1,
        column: 1,
        message: "empty input".into(),
    })?;
    let n: usize = first.trim().parse().map_err(|_| Error::Parse {
        line: first_no + 1,
        column: 1,
        message: format!("expected point count, found {:?}", first.trim()),
    })?;
    let mut dist = Vec::with_capacity(n);
    for (line_no, line) in lines {
        let mut row = Vec::with_capacity(n);
        for (column, token) in tokens_with_columns(line) {
            let value = parse_rational(token).map_err(|message| Error::Parse {
                line: line_no + 1,
                column,
                message,
            })?;
            row.push(value);
        }
        if row.len() != n {
            return Err(Error::Parse {
                line: line_no + 1,
                column: 1,
                message: format!("expected {n} entries, found {}", row.len()),
            });
        }
        dist.push(row);
    }
    if dist.len() != n {
        return Err(Error::Parse {
            line: text.lines().count(),
            column: 1,
            message: format!("expected {n} rows, found {}", dist.len()),
        });
    }
    Ok(dist)
}

fn tokens_with_columns(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        let sep = c.is_whitespace() || c == ',' || c == ';';
        match (sep, start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out.into_iter()
}

impl DistanceOracle for FiniteMetricSpace {
    type Point = usize;

    fn distance(&self, a: &usize, b: &usize) -> Distance {
        Distance::Exact(self.dist[*a][*b].clone())
    }

    fn points(&self) -> Option<Vec<usize>> {
        Some((0..self.size()).collect())
    }

    fn triangle_guaranteed(&self) -> bool {
        self.checked
    }
}

/// Points of a Euclidean space with rational coordinates; distances are
/// square roots of rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EuclideanPoints {
    coords: Vec<Vec<Rational>>,
}

impl EuclideanPoints {
    pub fn new(coords: Vec<Vec<Rational>>) -> Result<Self> {
        if let Some(first) = coords.first() {
            for c in &coords {
                if c.len() != first.len() {
                    return Err(Error::LengthMismatch {
                        expected: first.len(),
                        found: c.len(),
                    });
                }
            }
        }
        Ok(Self { coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn squared_distance(&self, a: usize, b: usize) -> Rational {
        self.coords[a]
            .iter()
            .zip(&self.coords[b])
            .map(|(x, y)| {
                let d = x - y;
                &d * &d
            })
            .fold(Rational::zero(), |acc, v| acc + v)
    }
}

impl DistanceOracle for EuclideanPoints {
    type Point = usize;

    fn distance(&self, a: &usize, b: &usize) -> Distance {
        Distance::power(
            self.squared_distance(*a, *b),
            crate::numeric::rational(1, 2),
        )
    }

    fn points(&self) -> Option<Vec<usize>> {
        Some((0..self.len()).collect())
    }

    fn triangle_guaranteed(&self) -> bool {
        true
    }
}

/// The metric transform `d'(x, y) = d(x, y)^alpha`.
#[derive(Debug, Clone)]
pub struct Snowflake<O> {
    inner: O,
    alpha: Rational,
}

impl<O: DistanceOracle> Snowflake<O> {
    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

/// Snowflake transform of `space` by `alpha` in `(0, 1]`.
pub fn snowflake<O: DistanceOracle>(space: O, alpha: Rational) -> Result<Snowflake<O>> {
    if !alpha.is_positive() || alpha > Rational::one() {
        return Err(Error::InvalidExponent {
            name: "alpha",
            value: format_rational(&alpha),
            range: "(0, 1]",
        });
    }
    Ok(Snowflake {
        inner: space,
        alpha,
    })
}

impl<O: DistanceOracle> DistanceOracle for Snowflake<O> {
    type Point = O::Point;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> Distance {
        self.inner.distance(a, b).raised(&self.alpha)
    }

    fn points(&self) -> Option<Vec<Self::Point>> {
        self.inner.points()
    }

    fn triangle_guaranteed(&self) -> bool {
        self.inner.triangle_guaranteed()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangleViolation<P> {
    pub x: P,
    pub y: P,
    pub z: P,
    /// `d(x,z) - d(x,y) - d(y,z)`, positive for a violation.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport<P> {
    pub exhaustive: bool,
    pub checked_triples: u64,
    pub symmetry_violations: Vec<(P, P)>,
    pub identity_violations: Vec<(P, P)>,
    pub negative_distances: Vec<(P, P)>,
    pub violations: Vec<TriangleViolation<P>>,
    pub violation_count: u64,
}

impl<P: Debug> ValidationReport<P> {
    pub fn is_metric(&self) -> bool {
        self.symmetry_violations.is_empty()
            && self.identity_violations.is_empty()
            && self.negative_distances.is_empty()
            && self.violation_count == 0
    }

    pub fn first_failure(&self) -> Option<String> {
        if let Some((a, b)) = self.negative_distances.first() {
            return Some(format!("negative distance between {a:?} and {b:?}"));
        }
        if let Some((a, b)) = self.identity_violations.first() {
            return Some(format!("identity of indiscernibles fails at {a:?}, {b:?}"));
        }
        if let Some((a, b)) = self.symmetry_violations.first() {
            return Some(format!("asymmetric distance between {a:?} and {b:?}"));
        }
        self.violations.first().map(|v| {
            format!(
                "triangle inequality fails: d({:?},{:?}) exceeds the detour through {:?} by {}",
                v.x, v.z, v.y, v.excess
            )
        })
    }
}

const STORED_VIOLATIONS: usize = 1000;

/// Audits identity, symmetry and the triangle inequality.
///
/// Triples `(x, y, z)` with `x < z` and `y` distinct from both are scanned
/// exhaustively when there are at most `budget` of them; otherwise `budget`
/// triples are drawn with a seeded generator. Exact distances are compared
/// exactly; irrational ones in high precision with the relative tolerance.
pub fn validate_metric<O: DistanceOracle>(
    space: &O,
    budget: u64,
    seed: u64,
    numerics: &Numerics,
) -> Result<ValidationReport<O::Point>> {
    let points = space.points().ok_or(Error::EnumerationUnavailable)?;
    let n = points.len();
    let table: Vec<Vec<Distance>> = points
        .iter()
        .map(|a| points.iter().map(|b| space.distance(a, b)).collect())
        .collect();

    let mut symmetry = Vec::new();
    let mut identity = Vec::new();
    let mut negative = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let d = &table[i][j];
            if d.is_negative() {
                negative.push((points[i].clone(), points[j].clone()));
            }
            if (i == j) != d.is_zero() {
                identity.push((points[i].clone(), points[j].clone()));
            }
            if j > i && table[i][j] != table[j][i] {
                symmetry.push((points[i].clone(), points[j].clone()));
            }
        }
    }

    let n64 = n as u64;
    let total = if n < 3 {
        0
    } else {
        n64 * (n64 - 1) * (n64 - 2) / 2
    };
    let exhaustive = total <= budget;

    let bits = numerics.precision_bits;
    let tol = numerics.tolerance;
    let check = |x: usize, y: usize, z: usize, ctx: &mut HighPrecision| -> Option<f64> {
        triangle_excess(&table[x][z], &table[x][y], &table[y][z], tol, ctx)
    };

    let found: Vec<(usize, usize, usize, f64)> = if exhaustive {
        (0..n)
            .into_par_iter()
            .map(|x| {
                let mut ctx = HighPrecision::new(bits);
                let mut local = Vec::new();
                for z in x + 1..n {
                    for y in 0..n {
                        if y == x || y == z {
                            continue;
                        }
                        if let Some(e) = check(x, y, z, &mut ctx) {
                            local.push((x, y, z, e));
                        }
                        if let Some(e) = check(z, y, x, &mut ctx) {
                            local.push((z, y, x, e));
                        }
                    }
                }
                local
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ctx = HighPrecision::new(bits);
        let mut local = Vec::new();
        for _ in 0..budget {
            let x = rng.gen_range(0..n);
            let y = rng.gen_range(0..n);
            let z = rng.gen_range(0..n);
            if x == y || y == z || x == z {
                continue;
            }
            if let Some(e) = check(x, y, z, &mut ctx) {
                local.push((x, y, z, e));
            }
        }
        local
    };

    let violation_count = found.len() as u64;
    let violations = found
        .into_iter()
        .take(STORED_VIOLATIONS)
        .map(|(x, y, z, excess)| TriangleViolation {
            x: points[x].clone(),
            y: points[y].clone(),
            z: points[z].clone(),
            excess,
        })
        .collect();

    Ok(ValidationReport {
        exhaustive,
        checked_triples: if exhaustive { total } else { budget },
        symmetry_violations: symmetry,
        identity_violations: identity,
        negative_distances: negative,
        violations,
        violation_count,
    })
}

/// Returns `Some(d_xz - d_xy - d_yz)` when the direct distance exceeds the
/// detour.
pub fn triangle_excess(
    direct: &Distance,
    leg1: &Distance,
    leg2: &Distance,
    tolerance: f64,
    ctx: &mut HighPrecision,
) -> Option<f64> {
    if let (Some(d), Some(a), Some(b)) = (direct.as_exact(), leg1.as_exact(), leg2.as_exact()) {
        let excess = d - a - b;
        return excess.is_positive().then(|| rational_to_f64(&excess));
    }
    let d = direct.to_big(ctx);
    let a = leg1.to_big(ctx);
    let b = leg2.to_big(ctx);
    let detour = ctx.add(&a, &b);
    let excess = ctx.sub(&d, &detour);
    let scale = ctx.add(&d, &detour);
    let slack = ctx.mul(&scale, &ctx.from_f64(tolerance));
    crate::numeric::less_than(&slack, &excess).then(|| to_f64(&excess))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{integer, rational};

    fn space(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|v| integer(*v)).collect())
            .collect()
    }

    fn four_cycle() -> FiniteMetricSpace {
        FiniteMetricSpace::new(space(&[
            &[0, 1, 2, 1],
            &[1, 0, 1, 2],
            &[2, 1, 0, 1],
            &[1, 2, 1, 0],
        ]))
        .unwrap()
    }

    #[test]
    fn equilateral_triangle_is_a_metric() {
        let s = FiniteMetricSpace::new(space(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]])).unwrap();
        let report = validate_metric(&s, u64::MAX, 0, &Numerics::default()).unwrap();
        assert!(report.exhaustive);
        assert_eq!(report.checked_triples, 3);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn long_side_violates_triangle() {
        let dist = space(&[&[0, 1, 3], &[1, 0, 1], &[3, 1, 0]]);
        assert!(matches!(
            FiniteMetricSpace::new(dist.clone()),
            Err(Error::NotAMetric(_))
        ));
        let s = FiniteMetricSpace::new_unchecked(dist).unwrap();
        let report = validate_metric(&s, u64::MAX, 0, &Numerics::default()).unwrap();
        assert_eq!(report.violation_count, 2);
        let v = &report.violations[0];
        assert_eq!((v.x, v.y, v.z), (0, 1, 2));
        assert_eq!(v.excess, 1.0);
    }

    #[test]
    fn asymmetry_and_identity_are_reported() {
        let s = FiniteMetricSpace::new_unchecked(space(&[&[0, 1], &[2, 0]])).unwrap();
        let r = validate_metric(&s, 10, 0, &Numerics::default()).unwrap();
        assert_eq!(r.symmetry_violations, vec![(0, 1)]);
        let s = FiniteMetricSpace::new_unchecked(space(&[&[0, 0], &[0, 0]])).unwrap();
        let r = validate_metric(&s, 10, 0, &Numerics::default()).unwrap();
        assert_eq!(r.identity_violations.len(), 2);
    }

    #[test]
    fn csv_roundtrip_and_diagnostics() {
        let text = "3\n0 1/2 1\n1/2, 0, 1/2\n1 0.5 0\n";
        let s = FiniteMetricSpace::from_csv(text).unwrap();
        assert_eq!(s.get(0, 1), &rational(1, 2));
        assert_eq!(FiniteMetricSpace::from_csv(&s.to_csv()).unwrap(), s);

        let err = FiniteMetricSpace::from_csv("2\n0 1\n1 x\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 3,
                column: 3,
                message: "not a rational number: \"x\"".into()
            }
        );
        assert!(matches!(
            FiniteMetricSpace::from_csv("3\n0 1 1\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn snowflake_identity_and_halving() {
        let s = four_cycle();
        let same = snowflake(&s, integer(1)).unwrap();
        assert_eq!(same.distance(&0, &2), s.distance(&0, &2));

        let two = FiniteMetricSpace::new(space(&[&[0, 4], &[4, 0]])).unwrap();
        let half = snowflake(&two, rational(1, 2)).unwrap();
        assert_eq!(half.distance(&0, &1), Distance::from_integer(2));

        assert!(snowflake(&s, integer(0)).is_err());
        assert!(snowflake(&s, rational(3, 2)).is_err());
    }

    #[test]
    fn nested_snowflakes_compose_exactly() {
        let s = four_cycle();
        let a = rational(2, 3);
        let b = rational(3, 4);
        let nested = snowflake(snowflake(&s, a.clone()).unwrap(), b.clone()).unwrap();
        let direct = snowflake(&s, a * b).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(nested.distance(&i, &j), direct.distance(&i, &j));
            }
        }
    }

    #[test]
    fn snowflaked_space_stays_metric() {
        let s = four_cycle();
        let flake = snowflake(&s, rational(1, 3)).unwrap();
        let report = validate_metric(&flake, u64::MAX, 0, &Numerics::default()).unwrap();
        assert!(report.is_metric());
    }

    #[test]
    fn sampled_validation_is_seeded() {
        let s = four_cycle();
        let a = validate_metric(&s, 5, 9, &Numerics::default()).unwrap();
        assert!(!a.exhaustive);
        assert_eq!(a.checked_triples, 5);
    }

    #[test]
    fn powers_follow_zero_conventions() {
        let mut ctx = HighPrecision::new(80);
        let zero = Distance::from_integer(0);
        assert_eq!(to_f64(&zero.pow_big(0.0, &mut ctx)), 0.0);
        let three = Distance::from_integer(3);
        assert_eq!(to_f64(&three.pow_big(0.0, &mut ctx)), 1.0);
        assert_eq!(to_f64(&three.pow_big(2.0, &mut ctx)), 9.0);
        let root2 = Distance::power(integer(2), rational(1, 2));
        assert!((to_f64(&root2.pow_big(2.0, &mut ctx)) - 2.0).abs() < 1e-20);
        assert!((root2.pow_f64(1.0) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn euclidean_distances() {
        let pts = EuclideanPoints::new(vec![
            vec![integer(0), integer(0)],
            vec![integer(3), integer(4)],
            vec![integer(1), integer(1)],
        ])
        .unwrap();
        assert_eq!(pts.distance(&0, &1), Distance::from_integer(5));
        assert!(matches!(pts.distance(&0, &2), Distance::Power { .. }));
        let report = validate_metric(&pts, u64::MAX, 0, &Numerics::default()).unwrap();
        assert!(report.is_metric());
    }
}
