//! The generalized roundness inequality
//!
//! `sum_{i<j} d(x_i,x_j)^p + d(y_i,y_j)^p <= sum_{i,j} d(x_i,y_j)^p`,
//! exhaustive and randomized searches for configurations violating it, and a
//! bisection estimate of the largest admissible exponent.
//!
//! Powers use `0^p = 0` (also at `p = 0`) and `d^0 = 1` for `d > 0`. A gap of
//! exactly zero is not a violation.

use std::cell::Cell;

use astro_float::BigFloat;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::metric::{Distance, DistanceOracle};
use crate::numeric::{less_than, to_f64, HighPrecision, Numerics};

/// Two equally long families of (not necessarily distinct) points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleSimplex<P> {
    pub xs: Vec<P>,
    pub ys: Vec<P>,
}

impl<P> DoubleSimplex<P> {
    pub fn new(xs: Vec<P>, ys: Vec<P>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch {
                expected: xs.len(),
                found: ys.len(),
            });
        }
        if xs.len() < 2 {
            return Err(Error::TooFewPoints(
                "a double simplex needs at least two points per family".into(),
            ));
        }
        Ok(Self { xs, ys })
    }

    pub fn size(&self) -> usize {
        self.xs.len()
    }

    pub fn swapped(self) -> Self {
        Self {
            xs: self.ys,
            ys: self.xs,
        }
    }

    pub fn map<Q>(&self, f: impl Fn(&P) -> Q) -> DoubleSimplex<Q> {
        DoubleSimplex {
            xs: self.xs.iter().map(&f).collect(),
            ys: self.ys.iter().map(&f).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapResult {
    pub p: f64,
    /// Sum over edges.
    pub lhs: f64,
    /// Sum over connecting lines.
    pub rhs: f64,
    /// `rhs - lhs`, rounded from the high-precision difference.
    pub gap: f64,
    pub violated: bool,
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::InvalidExponent {
            name: "p",
            value: p.to_string(),
            range: "[0, inf)",
        });
    }
    Ok(())
}

fn decide(
    lhs: &BigFloat,
    rhs: &BigFloat,
    p: f64,
    tolerance: f64,
    ctx: &HighPrecision,
) -> GapResult {
    let gap = ctx.sub(rhs, lhs);
    let scale = ctx.add(rhs, lhs);
    let slack = ctx.mul(&scale, &ctx.from_f64(tolerance));
    let neg_gap = ctx.sub(&ctx.zero(), &gap);
    GapResult {
        p,
        lhs: to_f64(lhs),
        rhs: to_f64(rhs),
        gap: to_f64(&gap),
        violated: less_than(&slack, &neg_gap),
    }
}

/// Both sides of the inequality for one configuration, in high precision.
pub fn simplex_gap<O: DistanceOracle>(
    oracle: &O,
    ds: &DoubleSimplex<O::Point>,
    p: f64,
    numerics: &Numerics,
) -> Result<GapResult> {
    check_p(p)?;
    let mut ctx = numerics.context();
    let mut lhs = ctx.zero();
    let mut rhs = ctx.zero();
    for side in [&ds.xs, &ds.ys] {
        for i in 0..side.len() {
            for j in i + 1..side.len() {
                let v = oracle.distance(&side[i], &side[j]).pow_big(p, &mut ctx);
                lhs = ctx.add(&lhs, &v);
            }
        }
    }
    for x in &ds.xs {
        for y in &ds.ys {
            let v = oracle.distance(x, y).pow_big(p, &mut ctx);
            rhs = ctx.add(&rhs, &v);
        }
    }
    Ok(decide(&lhs, &rhs, p, numerics.tolerance, &ctx))
}

/// Re-evaluates a claimed violation at twice the working precision.
pub fn verify_witness<O: DistanceOracle>(
    oracle: &O,
    ds: &DoubleSimplex<O::Point>,
    p: f64,
    numerics: &Numerics,
) -> Result<GapResult> {
    let doubled = numerics.with_precision(numerics.precision_bits * 2);
    simplex_gap(oracle, ds, p, &doubled)
}

/// `d^p` for every ordered pair of an enumerated point list, in `f64` for
/// screening and in high precision for decisions.
struct PowerTable {
    n: usize,
    fast: Vec<f64>,
    exact: Vec<BigFloat>,
}

impl PowerTable {
    fn new(dist: &[Distance], n: usize, p: f64, bits: usize) -> Self {
        let exact: Vec<BigFloat> = dist
            .par_chunks(n.max(1))
            .map_init(
                || HighPrecision::new(bits),
                |ctx, row| row.iter().map(|d| d.pow_big(p, ctx)).collect::<Vec<_>>(),
            )
            .flatten()
            .collect();
        let fast = dist.iter().map(|d| d.pow_f64(p)).collect();
        Self { n, fast, exact }
    }

    fn fast_gap(&self, xs: &[u32], ys: &[u32]) -> (f64, f64) {
        let n = self.n;
        let at = |a: u32, b: u32| self.fast[a as usize * n + b as usize];
        let mut lhs = 0.0;
        for side in [xs, ys] {
            for i in 0..side.len() {
                for j in i + 1..side.len() {
                    lhs += at(side[i], side[j]);
                }
            }
        }
        let mut rhs = 0.0;
        for &x in xs {
            for &y in ys {
                rhs += at(x, y);
            }
        }
        (rhs - lhs, rhs + lhs)
    }

    fn exact_gap(
        &self,
        xs: &[u32],
        ys: &[u32],
        p: f64,
        tol: f64,
        ctx: &HighPrecision,
    ) -> GapResult {
        let n = self.n;
        let at = |a: u32, b: u32| &self.exact[a as usize * n + b as usize];
        let mut lhs = ctx.zero();
        for side in [xs, ys] {
            for i in 0..side.len() {
                for j in i + 1..side.len() {
                    lhs = ctx.add(&lhs, at(side[i], side[j]));
                }
            }
        }
        let mut rhs = ctx.zero();
        for &x in xs {
            for &y in ys {
                rhs = ctx.add(&rhs, at(x, y));
            }
        }
        decide(&lhs, &rhs, p, tol, ctx)
    }

    /// Screens in `f64` and confirms anything close to a violation in high
    /// precision. A screened gap above `1e-9` of the total is far outside
    /// `f64` rounding error, so it cannot hide a violation.
    fn violates(&self, xs: &[u32], ys: &[u32], p: f64, tol: f64, ctx: &HighPrecision) -> bool {
        let (gap, scale) = self.fast_gap(xs, ys);
        if gap > 1e-9 * scale {
            return false;
        }
        self.exact_gap(xs, ys, p, tol, ctx).violated
    }
}

/// Non-decreasing index tuples of length `k` over `0..n`, in lexicographic order.
fn multisets(n: usize, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; k];
    if n == 0 {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if (cur[i] as usize) < n - 1 {
                let v = cur[i] + 1;
                for slot in &mut cur[i..] {
                    *slot = v;
                }
                break;
            }
        }
    }
}

/// Canonical configurations scanned by the exhaustive search: both families
/// sorted and `xs <= ys`, for every size in `2..=max_size`.
pub fn canonical_configuration_count(points: usize, max_size: usize) -> BigUint {
    (2..=max_size)
        .map(|k| {
            let m = num_integer::binomial(BigUint::from(points + k - 1), BigUint::from(k));
            &m * (&m + 1u32) / 2u32
        })
        .sum()
}

/// An enumerated space prepared for exhaustive scans.
pub struct ExhaustiveScanner<'a, O: DistanceOracle> {
    oracle: &'a O,
    points: Vec<O::Point>,
    dist: Vec<Distance>,
    max_size: usize,
    configurations: u64,
}

impl<'a, O: DistanceOracle> ExhaustiveScanner<'a, O> {
    pub fn new(oracle: &'a O, max_size: usize, budget: u64) -> Result<Self> {
        if max_size < 2 {
            return Err(Error::InvalidArgument("max size must be at least 2".into()));
        }
        let points = oracle.points().ok_or(Error::EnumerationUnavailable)?;
        if points.is_empty() {
            return Err(Error::TooFewPoints("the space is empty".into()));
        }
        let required = canonical_configuration_count(points.len(), max_size);
        let configurations =
            required
                .to_u64()
                .filter(|&c| c <= budget)
                .ok_or_else(|| Error::BudgetExceeded {
                    required: required.to_string(),
                    budget,
                })?;
        let dist = points
            .iter()
            .flat_map(|a| points.iter().map(move |b| oracle.distance(a, b)))
            .collect();
        Ok(Self {
            oracle,
            points,
            dist,
            max_size,
            configurations,
        })
    }

    pub fn configurations(&self) -> u64 {
        self.configurations
    }

    /// The first violating canonical configuration (by size, then `xs`, then
    /// `ys`), or `None`, which certifies that no configuration up to
    /// `max_size` violates the inequality at `p`.
    pub fn find_violation(
        &self,
        p: f64,
        numerics: &Numerics,
    ) -> Result<Option<DoubleSimplex<O::Point>>> {
        check_p(p)?;
        let n = self.points.len();
        let table = PowerTable::new(&self.dist, n, p, numerics.precision_bits);
        let tol = numerics.tolerance;
        for k in 2..=self.max_size {
            let fams = multisets(n, k);
            let found = (0..fams.len())
                .into_par_iter()
                .map_init(
                    || HighPrecision::new(numerics.precision_bits),
                    |ctx, i| {
                        (i..fams.len())
                            .find(|&j| table.violates(&fams[i], &fams[j], p, tol, ctx))
                            .map(|j| (i, j))
                    },
                )
                .find_first(|hit| hit.is_some())
                .flatten();
            if let Some((i, j)) = found {
                let pick = |f: &[u32]| f.iter().map(|&a| self.points[a as usize].clone()).collect();
                return Ok(Some(DoubleSimplex {
                    xs: pick(&fams[i]),
                    ys: pick(&fams[j]),
                }));
            }
        }
        Ok(None)
    }

    pub fn oracle(&self) -> &O {
        self.oracle
    }
}

/// Exhaustive search over all canonical configurations of sizes
/// `2..=max_size`. Fails if more than `budget` configurations would be needed.
pub fn find_violation_exhaustive<O: DistanceOracle>(
    oracle: &O,
    max_size: usize,
    p: f64,
    budget: u64,
    numerics: &Numerics,
) -> Result<Option<DoubleSimplex<O::Point>>> {
    ExhaustiveScanner::new(oracle, max_size, budget)?.find_violation(p, numerics)
}

/// Source of random points for the randomized search.
pub trait PointSampler<P>: Sync {
    fn sample(&self, rng: &mut ChaCha8Rng) -> P;

    /// A point near `p`; defaults to a fresh sample.
    fn perturb(&self, _p: &P, rng: &mut ChaCha8Rng) -> P {
        self.sample(rng)
    }
}

/// Uniform choice from a fixed list.
pub struct PoolSampler<P> {
    pool: Vec<P>,
}

impl<P: Clone + Sync> PoolSampler<P> {
    pub fn new(pool: Vec<P>) -> Result<Self> {
        if pool.is_empty() {
            return Err(Error::TooFewPoints("empty sampling pool".into()));
        }
        Ok(Self { pool })
    }
}

impl<P: Clone + Sync> PointSampler<P> for PoolSampler<P> {
    fn sample(&self, rng: &mut ChaCha8Rng) -> P {
        self.pool[rng.gen_range(0..self.pool.len())].clone()
    }
}

fn gap_f64<O: DistanceOracle>(oracle: &O, xs: &[O::Point], ys: &[O::Point], p: f64) -> (f64, f64) {
    let mut lhs = 0.0;
    for side in [xs, ys] {
        for i in 0..side.len() {
            for j in i + 1..side.len() {
                lhs += oracle.distance(&side[i], &side[j]).pow_f64(p);
            }
        }
    }
    let mut rhs = 0.0;
    for x in xs {
        for y in ys {
            rhs += oracle.distance(x, y).pow_f64(p);
        }
    }
    (rhs - lhs, rhs + lhs)
}

/// Randomized hill climbing on the normalised gap `(rhs - lhs) / (rhs + lhs)`.
///
/// Each step replaces one point by a sample or a perturbation and keeps the
/// move unless the normalised gap grows; the search restarts with a fresh
/// configuration every few hundred steps. `budget` counts gap evaluations.
/// A returned configuration is always a certified violation; `None` certifies
/// nothing.
pub fn find_violation_search<O: DistanceOracle, S: PointSampler<O::Point> + ?Sized>(
    oracle: &O,
    sampler: &S,
    max_size: usize,
    p: f64,
    budget: u64,
    seed: u64,
    numerics: &Numerics,
) -> Result<Option<DoubleSimplex<O::Point>>> {
    check_p(p)?;
    if max_size < 2 {
        return Err(Error::InvalidArgument("max size must be at least 2".into()));
    }
    const RESTART: u64 = 400;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spent = 0u64;
    let score = |(gap, scale): (f64, f64)| if scale > 0.0 { gap / scale } else { 0.0 };
    while spent < budget {
        let k = rng.gen_range(2..=max_size);
        let mut xs: Vec<O::Point> = (0..k).map(|_| sampler.sample(&mut rng)).collect();
        let mut ys: Vec<O::Point> = (0..k).map(|_| sampler.sample(&mut rng)).collect();
        let mut current = score(gap_f64(oracle, &xs, &ys, p));
        spent += 1;
        let mut steps = 0;
        while steps < RESTART && spent < budget {
            if current <= 1e-9 {
                let ds = DoubleSimplex {
                    xs: xs.clone(),
                    ys: ys.clone(),
                };
                if simplex_gap(oracle, &ds, p, numerics)?.violated {
                    return Ok(Some(ds));
                }
            }
            let side = rng.gen_bool(0.5);
            let idx = rng.gen_range(0..k);
            let fam = if side { &mut xs } else { &mut ys };
            let old = fam[idx].clone();
            fam[idx] = if rng.gen_bool(0.5) {
                sampler.perturb(&old, &mut rng)
            } else {
                sampler.sample(&mut rng)
            };
            let candidate = score(gap_f64(oracle, &xs, &ys, p));
            spent += 1;
            steps += 1;
            if candidate <= current {
                current = candidate;
            } else {
                let fam = if side { &mut xs } else { &mut ys };
                fam[idx] = old;
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exhaustive,
    Randomized,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundnessEstimate<P> {
    /// Largest tested exponent with no violation found.
    pub lower: f64,
    /// Smallest tested exponent with a violation; `None` means no violation
    /// up to `p_cap`, serialised as `"none ≤ pCap"` so that truncation is not
    /// mistaken for infinite roundness.
    #[serde(serialize_with = "serialize_upper")]
    pub upper: Option<f64>,
    pub witness: Option<DoubleSimplex<P>>,
    pub witness_gap: Option<f64>,
    pub search_mode: SearchMode,
    pub max_size: usize,
    pub p_cap: f64,
    /// True when the bracket comes from exhaustive scans: no configuration
    /// up to `max_size` violates the inequality at `lower`.
    pub certified: bool,
    /// True when the budget ran out before the bracket reached the requested
    /// width.
    pub partial: bool,
    pub configurations_checked: u64,
    pub steps: u32,
}

fn serialize_upper<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_f64(*x),
        None => s.serialize_str(NO_VIOLATION_UP_TO_CAP),
    }
}

pub const NO_VIOLATION_UP_TO_CAP: &str = "none ≤ pCap";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimateMode {
    Exhaustive,
    Search { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateOptions {
    pub max_size: usize,
    pub p_tolerance: f64,
    pub p_cap: f64,
    /// Exhaustive mode: total configurations over all bisection steps.
    /// Search mode: gap evaluations per bisection step.
    pub budget: u64,
    pub mode: EstimateMode,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            max_size: 3,
            p_tolerance: 1e-3,
            p_cap: 16.0,
            budget: 10_000_000,
            mode: EstimateMode::Exhaustive,
        }
    }
}

/// Bisection for the largest exponent with no violation.
///
/// Admissible exponents form a down-set, so one violation at `p` settles
/// every larger exponent. The cap is tested first; the search then narrows
/// `[0, p_cap]` until the bracket is at most `p_tolerance` wide.
pub fn estimate_roundness<O: DistanceOracle>(
    oracle: &O,
    sampler: Option<&dyn PointSampler<O::Point>>,
    options: &EstimateOptions,
    numerics: &Numerics,
) -> Result<RoundnessEstimate<O::Point>> {
    if options.p_tolerance <= 0.0 || options.p_cap <= 0.0 {
        return Err(Error::InvalidArgument(
            "p tolerance and p cap must be positive".into(),
        ));
    }
    let scanner = match options.mode {
        EstimateMode::Exhaustive => Some(ExhaustiveScanner::new(
            oracle,
            options.max_size,
            options.budget,
        )?),
        EstimateMode::Search { .. } => None,
    };
    let spent = Cell::new(0u64);
    let probe = |p: f64, step: u64| -> Result<Option<Option<DoubleSimplex<O::Point>>>> {
        match (&scanner, options.mode) {
            (Some(sc), _) => {
                let cost = sc.configurations();
                if spent.get() + cost > options.budget {
                    return Ok(None);
                }
                spent.set(spent.get() + cost);
                Ok(Some(sc.find_violation(p, numerics)?))
            }
            (None, EstimateMode::Search { seed }) => {
                let sampler = sampler.ok_or_else(|| {
                    Error::InvalidArgument("randomized search needs a point sampler".into())
                })?;
                spent.set(spent.get() + options.budget);
                Ok(Some(find_violation_search(
                    oracle,
                    sampler,
                    options.max_size,
                    p,
                    options.budget,
                    seed.wrapping_add(step),
                    numerics,
                )?))
            }
            (None, EstimateMode::Exhaustive) => unreachable!("scanner exists in exhaustive mode"),
        }
    };

    let mut estimate = RoundnessEstimate {
        lower: 0.0,
        upper: None,
        witness: None,
        witness_gap: None,
        search_mode: match options.mode {
            EstimateMode::Exhaustive => SearchMode::Exhaustive,
            EstimateMode::Search { .. } => SearchMode::Randomized,
        },
        max_size: options.max_size,
        p_cap: options.p_cap,
        certified: scanner.is_some(),
        partial: false,
        configurations_checked: 0,
        steps: 0,
    };

    let record =
        |est: &mut RoundnessEstimate<O::Point>, p: f64, w: DoubleSimplex<O::Point>| -> Result<()> {
            let check = verify_witness(oracle, &w, p, numerics)?;
            if !check.violated {
                return Err(Error::Precision(format!(
                    "witness at p = {p} does not survive recomputation at doubled precision"
                )));
            }
            est.upper = Some(p);
            est.witness_gap = Some(check.gap);
            est.witness = Some(w);
            Ok(())
        };

    let mut step = 0u64;
    match probe(options.p_cap, step)? {
        None => {
            return Err(Error::BudgetExceeded {
                required: scanner
                    .as_ref()
                    .map_or(options.budget, |s| s.configurations())
                    .to_string(),
                budget: options.budget,
            })
        }
        Some(None) => {
            estimate.lower = options.p_cap;
            estimate.steps = 1;
            estimate.configurations_checked = spent.get();
            return Ok(estimate);
        }
        Some(Some(w)) => record(&mut estimate, options.p_cap, w)?,
    }
    step += 1;
    match probe(0.0, step)? {
        None => estimate.partial = true,
        Some(Some(w)) => {
            record(&mut estimate, 0.0, w)?;
        }
        Some(None) => {
            let mut lo = 0.0f64;
            let mut hi = options.p_cap;
            while hi - lo > options.p_tolerance {
                step += 1;
                let mid = 0.5 * (lo + hi);
                match probe(mid, step)? {
                    None => {
                        estimate.partial = true;
                        break;
                    }
                    Some(Some(w)) => {
                        hi = mid;
                        record(&mut estimate, mid, w)?;
                    }
                    Some(None) => lo = mid,
                }
            }
            estimate.lower = lo;
        }
    }
    estimate.steps = step as u32 + 1;
    estimate.configurations_checked = spent.get();
    Ok(estimate)
}
