use anyhow::{anyhow, bail, Context, Result};
use roundlab_core::numeric::{rational_to_f64, serde_rational};
use roundlab_core::obstruction::{
    coarse_obstruction_report, uniform_obstruction_report, verify_theorem1_chain,
    verify_theorem1_step, CircleMap, ConstantMap, EmbeddingMap, Identity, LevelMode, Parity,
    SnowflakeMap, UniformSampling,
};
use roundlab_core::products::{PairClass, SimplexClass};
use roundlab_core::{empirical_moduli, ModulusEnvelope, Rational};
use serde_json::{json, Value};

use super::{list, need_seed, pair, rational_arg, read_text, resolve_class};
use crate::args::{LevelArgs, MapArgs, ObstructCmd, ParityArg};
use crate::report::Outcome;

fn parse_map(args: &MapArgs) -> Result<Box<dyn EmbeddingMap>> {
    let spec = args.map.strip_prefix("builtin:").unwrap_or(&args.map);
    let declared = |what: &str| {
        args.declared.ok_or_else(|| {
            anyhow!(
                "--declared is required for the {what} map: its target has no certified roundness"
            )
        })
    };
    Ok(match spec {
        "circle" => Box::new(CircleMap),
        "constant" => Box::new(ConstantMap),
        "identity" => Box::new(Identity {
            declared: declared("identity")?,
        }),
        s => match s.strip_prefix("snowflake:") {
            Some(alpha) => Box::new(SnowflakeMap {
                alpha: rational_arg("map", alpha)?,
                declared: declared("snowflake")?,
            }),
            None => bail!("unknown map {:?}", args.map),
        },
    })
}

fn level_mode(args: &LevelArgs) -> Result<(LevelMode, Value)> {
    match args.samples {
        Some(samples) => {
            let seed = need_seed(args.seed, "Monte Carlo averaging")?;
            Ok((
                LevelMode::MonteCarlo { samples, seed },
                json!({ "exhaustive": false, "samples": samples, "seed": seed }),
            ))
        }
        None => Ok((
            LevelMode::Exact {
                budget: args.budget,
            },
            json!({ "exhaustive": true, "budget": args.budget }),
        )),
    }
}

fn read_envelope(text: &str) -> Result<ModulusEnvelope> {
    let value: Value = serde_json::from_str(text)?;
    if value.get("rho1").is_some() {
        let env: ModulusEnvelope = serde_json::from_value(value)?;
        return Ok(ModulusEnvelope::from_functions(env.rho1, env.rho2)?);
    }
    let samples = value
        .get("samples")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("moduli file needs rho1/rho2 or samples"))?;
    let parsed: Vec<(Rational, f64)> = samples
        .iter()
        .map(|s| {
            let domain = serde_rational::from_value(&s["domain"])
                .map_err(|e| anyhow!("sample domain: {e}"))?;
            let image = s["image"]
                .as_f64()
                .ok_or_else(|| anyhow!("sample image must be a number"))?;
            Ok((domain, image))
        })
        .collect::<Result<_>>()?;
    Ok(empirical_moduli(&parsed)?)
}

fn parse_p(text: &str) -> Result<f64> {
    match text {
        "inf" | "infinity" => Ok(f64::INFINITY),
        t => Ok(rational_to_f64(&rational_arg("p", t)?)),
    }
}

pub fn run(cmd: &ObstructCmd) -> Result<Outcome> {
    match cmd {
        ObstructCmd::Coarse {
            moduli,
            p,
            n_range,
            parity,
        } => {
            let envelope = read_envelope(&read_text(moduli)?)
                .with_context(|| format!("reading {}", moduli.display()))?;
            let range = pair::<u32>("n-range", n_range)?;
            let parity = match parity {
                ParityArg::Even => Parity::Even,
                ParityArg::Any => Parity::Any,
            };
            let report = coarse_obstruction_report(&envelope, *p, range, parity)?;
            let violation = report.witness.is_some();
            let parameters =
                json!({ "moduli": moduli, "p": p, "n_range": range, "parity": parity });
            Ok(Outcome::new(parameters, report, violation)?
                .with_provenance(json!({ "exhaustive": true })))
        }
        ObstructCmd::Uniform {
            map,
            n_ladder,
            p,
            samples,
            seed,
        } => {
            let m = parse_map(map)?;
            let ladder = list::<u32>("n-ladder", n_ladder)?;
            let p = parse_p(p)?;
            let (sampling, provenance) = match samples {
                Some(samples) => {
                    let seed = need_seed(*seed, "uniform sampling")?;
                    (
                        UniformSampling::Sampled {
                            samples: *samples,
                            seed,
                        },
                        json!({ "exhaustive": false, "samples": samples, "seed": seed }),
                    )
                }
                None => (UniformSampling::Orbit, json!({ "exhaustive": true })),
            };
            let report = uniform_obstruction_report(m.as_ref(), &ladder, p, sampling)?;
            let violation = report.first_failure.is_some();
            let parameters = json!({
                "map": map.map,
                "declared": map.declared,
                "n_ladder": ladder,
                "p": if p.is_infinite() { json!("inf") } else { json!(p) },
            });
            Ok(Outcome::new(parameters, report, violation)?.with_provenance(provenance))
        }
        ObstructCmd::Step {
            class,
            map,
            p,
            level,
        } => {
            let c = resolve_class(class)?;
            let m = parse_map(map)?;
            let (mode, provenance) = level_mode(level)?;
            let sc = SimplexClass::new(&c.space, c.size, c.delta, c.support)?;
            let report = verify_theorem1_step(m.as_ref(), &c.space, &sc, *p, mode, 1e-12)?;
            let mut parameters = c.parameters;
            parameters["map"] = json!(map.map);
            parameters["declared"] = json!(map.declared);
            parameters["p"] = json!(p);
            let violation = !report.holds;
            Ok(Outcome::new(parameters, report, violation)?.with_provenance(provenance))
        }
        ObstructCmd::Chain {
            class,
            map,
            p,
            levels,
            level,
        } => {
            let c = resolve_class(class)?;
            let m = parse_map(map)?;
            let (mode, provenance) = level_mode(level)?;
            let start = PairClass::new(&c.space, c.delta, c.support)?;
            let report = verify_theorem1_chain(
                m.as_ref(),
                &c.space,
                c.size,
                *levels,
                &start,
                *p,
                mode,
                1e-12,
            )?;
            let mut parameters = c.parameters;
            parameters["map"] = json!(map.map);
            parameters["declared"] = json!(map.declared);
            parameters["p"] = json!(p);
            parameters["levels"] = json!(levels);
            let violation = !report.holds;
            Ok(Outcome::new(parameters, report, violation)?.with_provenance(provenance))
        }
    }
}
