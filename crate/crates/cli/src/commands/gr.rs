use anyhow::Result;
use roundlab_core::roundness::{
    estimate_roundness, find_violation_exhaustive, find_violation_search, verify_witness,
    EstimateMode, EstimateOptions, PoolSampler,
};
use roundlab_core::{validate_metric, FiniteMetricSpace, Numerics};
use serde_json::json;

use super::{need_seed, read_space, read_text};
use crate::args::{GrCmd, MetricCmd, SearchArgs};
use crate::report::Outcome;

const DEFAULT_BUDGET: u64 = 10_000_000;
const DEFAULT_SEARCH_BUDGET: u64 = 100_000;

fn search_params(s: &SearchArgs) -> Result<(EstimateMode, u64)> {
    if s.search {
        let seed = need_seed(s.seed, "--search")?;
        Ok((
            EstimateMode::Search { seed },
            s.budget.unwrap_or(DEFAULT_SEARCH_BUDGET),
        ))
    } else {
        Ok((EstimateMode::Exhaustive, s.budget.unwrap_or(DEFAULT_BUDGET)))
    }
}

fn provenance(mode: EstimateMode, budget: u64) -> serde_json::Value {
    match mode {
        EstimateMode::Exhaustive => json!({ "exhaustive": true, "budget": budget }),
        EstimateMode::Search { seed } => {
            json!({ "exhaustive": false, "budget": budget, "seed": seed })
        }
    }
}

pub fn run(cmd: &GrCmd, numerics: &Numerics) -> Result<Outcome> {
    match cmd {
        GrCmd::Estimate {
            input,
            max_size,
            tol,
            p_cap,
            search,
        } => {
            let space = read_space(input)?;
            let (mode, budget) = search_params(search)?;
            let options = EstimateOptions {
                max_size: *max_size,
                p_tolerance: *tol,
                p_cap: *p_cap,
                budget,
                mode,
            };
            let pool = PoolSampler::new((0..space.size()).collect())?;
            let estimate = estimate_roundness(&space, Some(&pool), &options, numerics)?;
            let parameters = json!({
                "input": input,
                "points": space.size(),
                "max_size": max_size,
                "tol": tol,
                "p_cap": p_cap,
            });
            Ok(
                Outcome::new(parameters, estimate, false)?
                    .with_provenance(provenance(mode, budget)),
            )
        }
        GrCmd::Check {
            input,
            p,
            max_size,
            search,
        } => {
            let space = read_space(input)?;
            let (mode, budget) = search_params(search)?;
            let found = match mode {
                EstimateMode::Exhaustive => {
                    find_violation_exhaustive(&space, *max_size, *p, budget, numerics)?
                }
                EstimateMode::Search { seed } => {
                    let pool = PoolSampler::new((0..space.size()).collect())?;
                    find_violation_search(&space, &pool, *max_size, *p, budget, seed, numerics)?
                }
            };
            let gap = found
                .as_ref()
                .map(|w| verify_witness(&space, w, *p, numerics))
                .transpose()?;
            let parameters =
                json!({ "input": input, "points": space.size(), "p": p, "max_size": max_size });
            let results = json!({ "violated": found.is_some(), "witness": found, "gap": gap });
            Ok(Outcome::new(parameters, results, found.is_some())?
                .with_provenance(provenance(mode, budget)))
        }
    }
}

pub fn run_metric(cmd: &MetricCmd, numerics: &Numerics) -> Result<Outcome> {
    let MetricCmd::Validate {
        input,
        budget,
        seed,
    } = cmd;
    // Deliberately non-metric matrices must load to be audited.
    let space = FiniteMetricSpace::from_csv_unchecked(&read_text(input)?)?;
    let report = validate_metric(&space, *budget, *seed, numerics)?;
    let verdict = json!({
        "is_metric": report.is_metric(),
        "first_failure": report.first_failure(),
        "report": report,
    });
    let exhaustive = verdict["report"]["exhaustive"].as_bool().unwrap_or(false);
    let parameters =
        json!({ "input": input, "points": space.size(), "budget": budget, "seed": seed });
    let violation = !verdict["is_metric"].as_bool().unwrap_or(false);
    Ok(
        Outcome::new(parameters, verdict, violation)?.with_provenance(json!({
            "exhaustive": exhaustive,
            "budget": budget,
            "seed": seed,
        })),
    )
}
