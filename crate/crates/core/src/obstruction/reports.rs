//! The coarse and uniform contradictions, instantiated on concrete moduli and
//! maps. These are conditional checks on finite data, not proofs.

use num_bigint::BigInt;
use num_traits::Pow;
use serde::Serialize;

use super::levels::{level_average, roundness_label, AverageKind, LevelMode, SAMPLE_COORD_LIMIT};
use super::maps::EmbeddingMap;
use crate::error::{Error, Result};
use crate::metric::ModulusEnvelope;
use crate::numeric::{integer, pow2, rational_to_f64, serde_real, Rational};
use crate::products::{NtmParams, PairClass};

/// `(1 - 1/(n+2))^n`, decreasing in `n` towards `1/e`.
pub fn euler_factor(n: u64) -> f64 {
    if n <= 64 {
        let base = Rational::new(BigInt::from(n + 1), BigInt::from(n + 2));
        rational_to_f64(&Pow::pow(base, n as u32))
    } else {
        (n as f64 * (-1.0 / (n as f64 + 2.0)).ln_1p()).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    /// Only even `n`, so that `M_(n+2)` exists.
    #[default]
    Even,
    Any,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoarseRow {
    pub n: u32,
    #[serde(with = "serde_real")]
    pub rho1: f64,
    #[serde(with = "serde_real")]
    pub alpha: f64,
    /// `alpha^p / e`.
    #[serde(with = "serde_real")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoarseWitness {
    pub n: u32,
    #[serde(with = "serde_real")]
    pub alpha: f64,
    /// `alpha^p / e - 1`.
    #[serde(with = "serde_real")]
    pub margin: f64,
    pub euler_factor: f64,
    /// `euler_factor(n) * alpha^p - 1`, the margin before rounding the
    /// factor down to `1/e`.
    #[serde(with = "serde_real")]
    pub sharp_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoarseReport {
    pub kind: &'static str,
    pub p: f64,
    pub parity: Parity,
    pub n_range: (u32, u32),
    pub rho2_at_1: f64,
    pub margin_formula: &'static str,
    pub witness: Option<CoarseWitness>,
    #[serde(with = "serde_real")]
    pub contradiction_margin: f64,
    pub binding_constraint: Option<String>,
    pub conclusion: String,
    pub scanned: Vec<CoarseRow>,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Searches `n_range` for the first `n` with `rho1(2^n) >= alpha rho2(1)` and
/// `alpha^p / e > 1`, taking `alpha = rho1(2^n) / rho2(1)`.
pub fn coarse_obstruction_report(
    envelope: &ModulusEnvelope,
    p: f64,
    n_range: (u32, u32),
    parity: Parity,
) -> Result<CoarseReport> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidExponent {
            name: "p",
            value: p.to_string(),
            range: "(0, inf)",
        });
    }
    let (lo, hi) = n_range;
    if lo == 0 || lo > hi {
        return Err(Error::InvalidArgument(format!(
            "bad range of n: {lo}..={hi}"
        )));
    }
    let rho2 = envelope.rho2(&integer(1));
    let e = std::f64::consts::E;
    let scanned: Vec<CoarseRow> = (lo..=hi)
        .filter(|n| parity == Parity::Any || n % 2 == 0)
        .map(|n| {
            let rho1 = envelope.rho1(&pow2(n as i64));
            let alpha = ratio(rho1, rho2);
            CoarseRow {
                n,
                rho1,
                alpha,
                value: alpha.powf(p) / e,
            }
        })
        .collect();
    let witness = scanned.iter().find(|r| r.value > 1.0).map(|r| {
        let euler = euler_factor(r.n as u64);
        CoarseWitness {
            n: r.n,
            alpha: r.alpha,
            margin: r.value - 1.0,
            euler_factor: euler,
            sharp_margin: euler * r.alpha.powf(p) - 1.0,
        }
    });
    let contradiction_margin = match &witness {
        Some(w) => w.margin,
        None => scanned
            .iter()
            .map(|r| r.value - 1.0)
            .fold(f64::NEG_INFINITY, f64::max),
    };
    let (binding_constraint, conclusion) = match &witness {
        Some(w) => (
            None,
            format!(
                "at n = {}, the connecting-class average over M_{} is at most rho2(1)^p but at least \
                 alpha^p/e * rho2(1)^p with alpha^p/e = {:.6} > 1: no coarse embedding with these \
                 moduli into a space of generalized roundness >= {p}",
                w.n,
                w.n + 2,
                w.margin + 1.0
            ),
        ),
        None => {
            let threshold = e.powf(1.0 / p) * rho2;
            let sup_rho1 = envelope
                .rho1
                .steps
                .last()
                .map_or(envelope.rho1.before, |s| s.value);
            let constraint = if sup_rho1 <= threshold {
                format!(
                    "rho1 does not diverge: sup rho1 = {sup_rho1} never exceeds e^(1/p) rho2(1) = {threshold}"
                )
            } else {
                let reached = scanned.iter().map(|r| r.rho1).fold(f64::NEG_INFINITY, f64::max);
                format!(
                    "no admissible n in {lo}..={hi} has rho1(2^n) > e^(1/p) rho2(1) = {threshold}; \
                     the largest value reached is {reached}"
                )
            };
            (
                Some(constraint),
                "no contradiction on the scanned range".to_string(),
            )
        }
    };
    Ok(CoarseReport {
        kind: "coarse",
        p,
        parity,
        n_range,
        rho2_at_1: rho2,
        margin_formula: "alpha^p / e - 1",
        witness,
        contradiction_margin,
        binding_constraint,
        conclusion,
        scanned,
    })
}

/// How the uniform report evaluates image distances on a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniformSampling {
    /// Use the map's class-invariant distance.
    Orbit,
    /// Sample class members; falls back to the orbit value when points are
    /// too large to materialize `samples` times.
    Sampled { samples: u64, seed: u64 },
}

/// Coordinates times samples allowed before sampling gives way to the orbit
/// value.
pub const SAMPLE_WORK_LIMIT: u64 = 1 << 28;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformRow {
    pub n: u32,
    /// The block `M_(n+2)` hosting both classes.
    pub block: u32,
    pub fine_class: PairClass,
    pub coarse_class: PairClass,
    /// Domain distance on the fine class, `2^-n`.
    pub fine_domain_distance: f64,
    pub fine_kind: AverageKind,
    pub coarse_kind: AverageKind,
    pub sup_fine: f64,
    pub inf_coarse: f64,
    /// `factor * inf_coarse`.
    pub bound: f64,
    /// `sup_fine - bound`.
    pub margin: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformReport {
    pub kind: &'static str,
    pub map: String,
    pub declared_roundness: String,
    #[serde(with = "serde_real")]
    pub p: f64,
    /// `e^(-1/p)`, or 1 when `p` is infinite.
    pub factor: f64,
    pub premise_holds: bool,
    pub margin_formula: &'static str,
    pub rows: Vec<UniformRow>,
    pub epsilon_observed: f64,
    /// First `n` at which `sup_fine < factor * inf_coarse`.
    pub first_failure: Option<u32>,
    pub contradiction_margin: f64,
    pub conclusion: String,
}

fn class_extremes<M: EmbeddingMap + ?Sized>(
    map: &M,
    params: &NtmParams,
    sampling: UniformSampling,
    salt: u64,
) -> Result<(AverageKind, f64, f64)> {
    let class = params.pair_class()?;
    let space = &params.space;
    let orbit = || {
        map.class_distance(space, &class)
            .map(|d| (AverageKind::Orbit, d, d))
            .ok_or(Error::BlockTooLarge { block: params.n })
    };
    match sampling {
        UniformSampling::Orbit => orbit().map_err(|_| {
            Error::InvalidArgument(format!(
                "map {} has no class-invariant distance; sampling is required",
                map.label()
            ))
        }),
        UniformSampling::Sampled { samples, seed } => {
            let work = (space.coords as u64).saturating_mul(samples);
            if space.coords > SAMPLE_COORD_LIMIT || work > SAMPLE_WORK_LIMIT {
                return orbit();
            }
            let avg = level_average(
                map,
                space,
                &class,
                1.0,
                LevelMode::MonteCarlo {
                    samples,
                    seed: seed ^ salt,
                },
            )?;
            Ok((AverageKind::MonteCarlo, avg.max_image, avg.min_image))
        }
    }
}

/// The fine/coarse comparison along a ladder of even `n`: in `M_(n+2)`, the
/// supremum of image distances over the fine class (domain distance `2^-n`)
/// must be at least `e^(-1/p)` times the infimum over the coarse class
/// (domain distance `1`) whenever the target has roundness `>= p`.
pub fn uniform_obstruction_report<M: EmbeddingMap + ?Sized>(
    map: &M,
    ladder: &[u32],
    p: f64,
    sampling: UniformSampling,
) -> Result<UniformReport> {
    if !(p > 0.0) {
        return Err(Error::InvalidExponent {
            name: "p",
            value: p.to_string(),
            range: "(0, inf]",
        });
    }
    if ladder.is_empty() {
        return Err(Error::InvalidArgument("the n-ladder is empty".into()));
    }
    let factor = if p.is_infinite() {
        1.0
    } else {
        (-1.0 / p).exp()
    };
    let mut rows = Vec::with_capacity(ladder.len());
    for &n in ladder {
        if n == 0 || n % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "ladder entries must be positive and even, found {n}"
            )));
        }
        let block = n + 2;
        let wrap = |e: Error| match e {
            Error::InvalidArgument(_) => e,
            _ => Error::BlockTooLarge { block },
        };
        let fine = NtmParams::new(block, -(n as i32), n + 1).map_err(wrap)?;
        let coarse = NtmParams::new(block, 0, 1).map_err(wrap)?;
        let (fine_kind, sup_fine, _) = class_extremes(map, &fine, sampling, 2 * n as u64)?;
        let (coarse_kind, _, inf_coarse) =
            class_extremes(map, &coarse, sampling, 2 * n as u64 + 1)?;
        let bound = factor * inf_coarse;
        let margin = sup_fine - bound;
        rows.push(UniformRow {
            n,
            block,
            fine_class: fine.pair_class()?,
            coarse_class: coarse.pair_class()?,
            fine_domain_distance: rational_to_f64(&fine.delta_real()),
            fine_kind,
            coarse_kind,
            sup_fine,
            inf_coarse,
            bound,
            margin,
            holds: margin >= -1e-12 * (sup_fine.abs() + bound.abs()),
        });
    }
    let epsilon_observed = rows
        .iter()
        .map(|r| r.inf_coarse)
        .fold(f64::INFINITY, f64::min);
    let first_failure = rows.iter().find(|r| !r.holds).map(|r| r.n);
    let contradiction_margin = rows
        .iter()
        .map(|r| -r.margin)
        .fold(f64::NEG_INFINITY, f64::max);
    let declared = map.declared_roundness();
    let premise_holds = declared >= p;
    let conclusion = if !map.injective() || epsilon_observed <= 0.0 {
        "no obstruction derivable: points at domain distance >= 1 share an image, so the inverse is \
         not injective"
            .to_string()
    } else if let Some(n) = first_failure {
        if premise_holds {
            format!(
                "the inequality fails at n = {n}: these image distances cannot come from a target of \
                 generalized roundness >= {}",
                roundness_label(p)
            )
        } else {
            format!(
                "the inequality fails at n = {n}, consistent with declared roundness {} < p",
                roundness_label(declared)
            )
        }
    } else {
        format!(
            "the inequality holds on the ladder: image distances on the fine class stay >= {:.6} \
             while the domain distance 2^-n shrinks, so the map is not uniformly continuous",
            factor * epsilon_observed
        )
    };
    Ok(UniformReport {
        kind: "uniform",
        map: map.label(),
        declared_roundness: roundness_label(declared),
        p,
        factor,
        premise_holds,
        margin_formula: "e^(-1/p) * inf_coarse - sup_fine",
        rows,
        epsilon_observed,
        first_failure,
        contradiction_margin,
        conclusion,
    })
}
