//! Class averages of `d^p(f x, f y)` and the single-step and chained
//! averaged inequalities built from them.

use num_bigint::BigUint;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::maps::EmbeddingMap;
use crate::error::{Error, Result};
use crate::numeric::serde_display;
use crate::products::{count_pairs_closed, PairClass, ProductCycleSpace, SimplexClass};

/// Samples drawn per random stream; fixing it makes results independent of
/// the number of workers.
const MC_CHUNK: u64 = 1024;
/// Starting points per exact-summation chunk.
const EXACT_CHUNK: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelMode {
    /// Every pair of the class, by enumeration of the space.
    Exact { budget: u64 },
    /// The map's common value on the class (it must provide one).
    Orbit,
    /// Uniform random class members.
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AverageKind {
    Exact,
    Orbit,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelAverage {
    pub class: PairClass,
    pub p: f64,
    /// Mean of `d^p` over the class (or over the samples).
    pub mean: f64,
    /// Standard error of `mean`; zero for exact and orbit averages.
    pub stderr: f64,
    pub kind: AverageKind,
    /// Class size `N`.
    #[serde(with = "serde_display")]
    pub class_size: BigUint,
    /// Pairs actually evaluated.
    pub evaluated: u64,
    pub seed: Option<u64>,
    /// Smallest and largest image distance seen (not raised to `p`).
    pub min_image: f64,
    pub max_image: f64,
}

pub(crate) fn pow_p(d: f64, p: f64) -> f64 {
    if d == 0.0 {
        0.0
    } else if p == 0.0 {
        1.0
    } else {
        d.powf(p)
    }
}

/// Running mean/variance (Welford) plus extremes, mergeable in a fixed order.
#[derive(Debug, Clone, Copy)]
struct Accumulator {
    n: u64,
    mean: f64,
    m2: f64,
    min: f64,
    max: f64,
}

impl Accumulator {
    fn new() -> Self {
        Self {
            n: 0,
            mean: 0.0,
            m2: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    fn push(&mut self, image: f64, value: f64) {
        self.n += 1;
        let d = value - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (value - self.mean);
        self.min = self.min.min(image);
        self.max = self.max.max(image);
    }

    fn merge(self, o: Self) -> Self {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Self {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64 * o.n as f64) / n as f64,
            min: self.min.min(o.min),
            max: self.max.max(o.max),
        }
    }

    fn stderr(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
        }
    }
}

/// A uniformly random member of the class: uniform support set, uniform
/// first point, uniform orientation on each differing coordinate.
pub fn sample_pair(
    space: &ProductCycleSpace,
    class: &PairClass,
    rng: &mut ChaCha8Rng,
) -> (Vec<u64>, Vec<u64>) {
    let u = space.units();
    let x: Vec<u64> = (0..space.coords).map(|_| rng.gen_range(0..u)).collect();
    let mut y = x.clone();
    let antipodal = 2 * class.delta == u;
    for c in index::sample(rng, space.coords, class.support) {
        let step = if antipodal || rng.gen_bool(0.5) {
            class.delta
        } else {
            u - class.delta
        };
        y[c] = (x[c] + step) % u;
    }
    (x, y)
}

/// Largest number of coordinates sampled points may have.
pub const SAMPLE_COORD_LIMIT: usize = 1 << 16;

/// Average of `d^p(f x, f y)` over one pair class.
pub fn level_average<M: EmbeddingMap + ?Sized>(
    map: &M,
    space: &ProductCycleSpace,
    class: &PairClass,
    p: f64,
    mode: LevelMode,
) -> Result<LevelAverage> {
    let class = PairClass::new(space, class.delta, class.support)?;
    let class_size = count_pairs_closed(space.coords, space.units(), &class);
    let mut out = LevelAverage {
        class,
        p,
        mean: 0.0,
        stderr: 0.0,
        kind: AverageKind::Exact,
        class_size: class_size.clone(),
        evaluated: 0,
        seed: None,
        min_image: 0.0,
        max_image: 0.0,
    };
    match mode {
        LevelMode::Orbit => {
            let d = map.class_distance(space, &class).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "map {} has no class-invariant distance",
                    map.label()
                ))
            })?;
            out.kind = AverageKind::Orbit;
            out.mean = pow_p(d, p);
            out.evaluated = 1;
            out.min_image = d;
            out.max_image = d;
        }
        LevelMode::Exact { budget } => {
            let points = match space.point_count() {
                Some(n) if n <= budget => n,
                _ => {
                    return Err(Error::BudgetExceeded {
                        required: num_traits::Pow::pow(BigUint::from(space.units()), space.coords)
                            .to_string(),
                        budget,
                    })
                }
            };
            let chunks = points.div_ceil(EXACT_CHUNK);
            let partial: Vec<(f64, f64, u64, f64, f64)> = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut sum = 0.0;
                    let mut comp = 0.0;
                    let mut n = 0u64;
                    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                    for i in c * EXACT_CHUNK..((c + 1) * EXACT_CHUNK).min(points) {
                        let x = space.decode(i);
                        for y in space.class_neighbors(&x, &class) {
                            if space.encode(&y) <= i {
                                continue;
                            }
                            let d = map.image_distance(space, &x, &y);
                            neumaier(&mut sum, &mut comp, pow_p(d, p));
                            n += 1;
                            lo = lo.min(d);
                            hi = hi.max(d);
                        }
                    }
                    (sum, comp, n, lo, hi)
                })
                .collect();
            let (mut sum, mut comp, mut n) = (0.0, 0.0, 0u64);
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for (s, c, k, l, h) in partial {
                neumaier(&mut sum, &mut comp, s);
                neumaier(&mut sum, &mut comp, c);
                n += k;
                lo = lo.min(l);
                hi = hi.max(h);
            }
            if BigUint::from(n) != class_size {
                return Err(Error::InvalidArgument(format!(
                    "enumerated {n} pairs but the class has {class_size}"
                )));
            }
            out.mean = (sum + comp) / n as f64;
            out.evaluated = n;
            out.min_image = lo;
            out.max_image = hi;
        }
        LevelMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::InvalidArgument(
                    "at least one sample is required".into(),
                ));
            }
            if space.coords > SAMPLE_COORD_LIMIT {
                return Err(Error::InvalidArgument(format!(
                    "sampling points with {} coordinates is not supported",
                    space.coords
                )));
            }
            let chunks = samples.div_ceil(MC_CHUNK);
            let acc = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(c);
                    let mut acc = Accumulator::new();
                    for _ in c * MC_CHUNK..((c + 1) * MC_CHUNK).min(samples) {
                        let (x, y) = sample_pair(space, &class, &mut rng);
                        let d = map.image_distance(space, &x, &y);
                        acc.push(d, pow_p(d, p));
                    }
                    acc
                })
                .collect::<Vec<_>>()
                .into_iter()
                .fold(Accumulator::new(), Accumulator::merge);
            out.kind = AverageKind::MonteCarlo;
            out.mean = acc.mean;
            out.stderr = acc.stderr();
            out.evaluated = acc.n;
            out.seed = Some(seed);
            out.min_image = acc.min;
            out.max_image = acc.max;
        }
    }
    Ok(out)
}

fn neumaier(sum: &mut f64, comp: &mut f64, v: f64) {
    let t = *sum + v;
    if sum.abs() >= v.abs() {
        *comp += (*sum - t) + v;
    } else {
        *comp += (v - t) + *sum;
    }
    *sum = t;
}

/// One comparison `upper >= factor * lower` between two level averages.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepCheck {
    pub upper_class: PairClass,
    pub lower_class: PairClass,
    pub factor: f64,
    pub upper_mean: f64,
    pub lower_mean: f64,
    /// `upper_mean - factor * lower_mean`.
    pub margin: f64,
    /// Slack granted before declaring failure: relative tolerance for exact
    /// averages, three combined standard errors for sampled ones.
    pub allowance: f64,
    pub holds: bool,
}

impl StepCheck {
    fn new(upper: &LevelAverage, lower: &LevelAverage, factor: f64, tolerance: f64) -> Self {
        let margin = upper.mean - factor * lower.mean;
        let scale = upper.mean.abs() + (factor * lower.mean).abs();
        let sampling = 3.0 * (upper.stderr.powi(2) + (factor * lower.stderr).powi(2)).sqrt();
        let allowance = tolerance * scale + sampling;
        Self {
            upper_class: upper.class,
            lower_class: lower.class,
            factor,
            upper_mean: upper.mean,
            lower_mean: lower.mean,
            margin,
            allowance,
            holds: margin >= -allowance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepReport {
    pub map: String,
    pub declared_roundness: String,
    pub simplex_size: usize,
    pub connecting: LevelAverage,
    pub edge: LevelAverage,
    pub check: StepCheck,
    pub holds: bool,
}

fn check_premise<M: EmbeddingMap + ?Sized>(map: &M, p: f64) -> Result<()> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::InvalidExponent {
            name: "p",
            value: p.to_string(),
            range: "[0, inf)",
        });
    }
    let declared = map.declared_roundness();
    if declared < p {
        return Err(Error::RoundnessPremise { declared, p });
    }
    Ok(())
}

pub(crate) fn roundness_label(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        v.to_string()
    }
}

/// The averaged inequality for one simplex class of size `r`:
/// `avg over the connecting class >= (1 - 1/r) * avg over the edge class`.
///
/// It follows from the roundness inequality on every simplex of the class,
/// so it must hold whenever the target's roundness is at least `p`.
pub fn verify_theorem1_step<M: EmbeddingMap + ?Sized>(
    map: &M,
    space: &ProductCycleSpace,
    class: &SimplexClass,
    p: f64,
    mode: LevelMode,
    tolerance: f64,
) -> Result<StepReport> {
    check_premise(map, p)?;
    let class = SimplexClass::new(space, class.size, class.delta, class.support)?;
    let (conn_mode, edge_mode) = split_modes(mode, 0);
    let connecting = level_average(map, space, &class.conn_class(), p, conn_mode)?;
    let edge = level_average(map, space, &class.edge_class(), p, edge_mode)?;
    let factor = 1.0 - 1.0 / class.size as f64;
    let check = StepCheck::new(&connecting, &edge, factor, tolerance);
    Ok(StepReport {
        map: map.label(),
        declared_roundness: roundness_label(map.declared_roundness()),
        simplex_size: class.size,
        holds: check.holds,
        connecting,
        edge,
        check,
    })
}

/// Independent random streams for consecutive levels.
fn split_modes(mode: LevelMode, level: u64) -> (LevelMode, LevelMode) {
    let at = |l: u64| match mode {
        LevelMode::MonteCarlo { samples, seed } => LevelMode::MonteCarlo {
            samples,
            seed: seed.wrapping_add(l.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        },
        other => other,
    };
    (at(level), at(level + 1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub map: String,
    pub declared_roundness: String,
    pub simplex_size: usize,
    pub levels: Vec<LevelAverage>,
    pub steps: Vec<StepCheck>,
    /// `(1 - 1/r)^k`.
    pub chain_factor: f64,
    /// Product of the step factors, for the consistency check.
    pub step_factor_product: f64,
    pub chain: StepCheck,
    pub holds: bool,
}

/// The classes visited by `levels` steps from `(delta, support)`: each step
/// doubles `delta` and divides the support by `r`.
pub fn chain_classes(
    space: &ProductCycleSpace,
    r: usize,
    levels: usize,
    start: &PairClass,
) -> Result<Vec<PairClass>> {
    let mut out = vec![
        PairClass::new(space, start.delta, start.support).map_err(|e| Error::Chain {
            level: 0,
            reason: e.to_string(),
        })?,
    ];
    for level in 0..levels {
        let cur = out[level];
        if cur.support % r != 0 {
            return Err(Error::Chain {
                level: level + 1,
                reason: format!("support {} is not divisible by {r}", cur.support),
            });
        }
        let simplex =
            SimplexClass::new(space, r, cur.delta, cur.support / r).map_err(|e| Error::Chain {
                level: level + 1,
                reason: e.to_string(),
            })?;
        out.push(simplex.edge_class());
    }
    Ok(out)
}

/// The averaged inequality iterated `levels` times:
/// `avg(top) >= (1 - 1/r)^levels * avg(bottom)`, with every intermediate step
/// checked as well.
pub fn verify_theorem1_chain<M: EmbeddingMap + ?Sized>(
    map: &M,
    space: &ProductCycleSpace,
    r: usize,
    levels: usize,
    start: &PairClass,
    p: f64,
    mode: LevelMode,
    tolerance: f64,
) -> Result<ChainReport> {
    check_premise(map, p)?;
    let classes = chain_classes(space, r, levels, start)?;
    let averages = classes
        .iter()
        .enumerate()
        .map(|(i, c)| level_average(map, space, c, p, split_modes(mode, i as u64).0))
        .collect::<Result<Vec<_>>>()?;
    let factor = 1.0 - 1.0 / r as f64;
    let steps: Vec<StepCheck> = averages
        .windows(2)
        .map(|w| StepCheck::new(&w[0], &w[1], factor, tolerance))
        .collect();
    let chain_factor = factor.powi(levels as i32);
    let step_factor_product = steps.iter().map(|s| s.factor).product();
    let chain = StepCheck::new(&averages[0], &averages[levels], chain_factor, tolerance);
    Ok(ChainReport {
        map: map.label(),
        declared_roundness: roundness_label(map.declared_roundness()),
        simplex_size: r,
        holds: chain.holds && steps.iter().all(|s| s.holds),
        levels: averages,
        steps,
        chain_factor,
        step_factor_product,
        chain,
    })
}
