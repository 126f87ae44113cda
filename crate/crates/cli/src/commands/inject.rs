use anyhow::{anyhow, Context, Result};
use roundlab_core::injections::{
    build_ballchain_injection, build_ell0_injection, build_ellp_injection, verify_injection,
    BallChain, InjectionMap, LevelRule, Modulus,
};
use roundlab_core::Numerics;
use serde_json::{json, Value};

use super::{rational_arg, read_space, read_text};
use crate::args::{InjectCmd, RuleArg};
use crate::report::Outcome;

fn chain_arg(spec: &str) -> Result<BallChain> {
    Ok(match spec {
        "interval" => BallChain::Interval,
        "cauchy" => BallChain::Cauchy,
        path => {
            let chain: BallChain = serde_json::from_str(&read_text(path.as_ref())?)
                .with_context(|| format!("parsing ball chain {path}"))?;
            chain.validate()?;
            chain
        }
    })
}

/// A bare map, or a report whose results hold one under `map`.
fn load_map(text: &str) -> Result<InjectionMap> {
    let value: Value = serde_json::from_str(text)?;
    let inner = match value.get("results").and_then(|r| r.get("map")) {
        Some(m) => m.clone(),
        None => value,
    };
    Ok(serde_json::from_value(inner)?)
}

pub fn run(cmd: &InjectCmd, numerics: &Numerics) -> Result<Outcome> {
    match cmd {
        InjectCmd::Build {
            input,
            target,
            rule,
        } => {
            let space = read_space(input)?;
            let rule = match rule {
                RuleArg::Strict => LevelRule::Strict,
                RuleArg::Inclusive => LevelRule::Inclusive,
            };
            let map = if target == "ell0" {
                build_ell0_injection(&space, rule)?
            } else if let Some(p) = target.strip_prefix("ellp:") {
                build_ellp_injection(&space, &rational_arg("target", p)?, rule)?
            } else if let Some(c) = target.strip_prefix("ballchain:") {
                build_ballchain_injection(&space, &chain_arg(c)?)?
            } else {
                return Err(anyhow!("unknown target {target:?}"));
            };
            let parameters =
                json!({ "input": input, "points": space.size(), "target": target, "rule": rule });
            let results = json!({
                "target": map.target.label(),
                "default_modulus": map.target.default_modulus().label(),
                "map": map,
            });
            Ok(Outcome::new(parameters, results, false)?
                .with_provenance(json!({ "exhaustive": true })))
        }
        InjectCmd::Verify { map, modulus } => {
            let m =
                load_map(&read_text(map)?).with_context(|| format!("parsing {}", map.display()))?;
            let modulus = match modulus {
                Some(text) => Modulus::parse(text)?,
                None => m.target.default_modulus(),
            };
            let report = verify_injection(&m, &modulus, numerics.tolerance)?;
            let violation = !report.holds;
            let parameters = json!({ "map": map, "modulus": modulus.label() });
            Ok(Outcome::new(parameters, report, violation)?
                .with_provenance(json!({ "exhaustive": true })))
        }
    }
}
