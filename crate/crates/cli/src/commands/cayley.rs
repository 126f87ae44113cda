use anyhow::{bail, Result};
use roundlab_core::cayley::{
    cayley_roundness_upper, verify_block_projection, verify_mstar_isometry, CheckMode, Family,
    GeneratorSet, Solver,
};
use roundlab_core::Numerics;
use serde_json::json;

use super::{list, need_seed, pair};
use crate::args::{CayleyCmd, FamilyArg, ModeArg, SolverArg};
use crate::report::Outcome;

fn family(f: FamilyArg) -> Family {
    match f {
        FamilyArg::Split => Family::Split,
        FamilyArg::Mixed => Family::Mixed,
    }
}

pub fn run(cmd: &CayleyCmd, numerics: &Numerics) -> Result<Outcome> {
    match cmd {
        CayleyCmd::Verify {
            n,
            mode,
            budget,
            seed,
            family: f,
            solver,
        } => {
            let (mode, provenance) = match mode {
                ModeArg::Exhaustive => (CheckMode::Exhaustive, json!({ "exhaustive": true })),
                ModeArg::Sampled => {
                    let seed = need_seed(*seed, "sampled mode")?;
                    (
                        CheckMode::Sampled {
                            budget: *budget,
                            seed,
                        },
                        json!({ "exhaustive": false, "budget": budget, "seed": seed }),
                    )
                }
            };
            let solver = match solver {
                SolverArg::Formula => Solver::Formula,
                SolverArg::Bfs => Solver::Bfs,
            };
            let report = verify_mstar_isometry(*n, family(*f), mode, solver)?;
            let violation = !report.holds;
            let parameters = json!({ "n": n, "family": family(*f), "solver": solver });
            Ok(Outcome::new(parameters, report, violation)?.with_provenance(provenance))
        }
        CayleyCmd::Roundness {
            dim,
            jump,
            family: f,
            g,
            h,
            witness_p,
        } => {
            let gens = match jump {
                Some(j) => GeneratorSet::block(family(*f), *dim, *j)?,
                None => GeneratorSet::Standard { dim: *dim },
            };
            let g = list::<i64>("g", g)?;
            let h = list::<i64>("h", h)?;
            let report = cayley_roundness_upper(&gens, &g, &h, *witness_p, numerics)?;
            let parameters = json!({ "generators": gens, "g": g, "h": h, "witness_p": witness_p });
            Ok(Outcome::new(parameters, report, false)?
                .with_provenance(json!({ "exhaustive": true })))
        }
        CayleyCmd::Projection {
            dims,
            jumps,
            radius,
            family: f,
        } => {
            let dims = pair::<usize>("dims", dims)?;
            let jumps = pair::<i64>("jumps", jumps)?;
            if dims.0 == 0 || dims.1 == 0 {
                bail!("--dims: both blocks need dimension >= 1");
            }
            let report = verify_block_projection(family(*f), dims, jumps, *radius)?;
            let violation = !report.holds;
            let parameters =
                json!({ "dims": dims, "jumps": jumps, "radius": radius, "family": family(*f) });
            Ok(Outcome::new(parameters, report, violation)?
                .with_provenance(json!({ "exhaustive": true })))
        }
    }
}
