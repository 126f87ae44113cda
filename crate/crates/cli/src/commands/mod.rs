mod cayley;
mod gr;
mod inject;
mod obstruct;
mod products;
mod zspace;

use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use log::info;
use roundlab_core::numeric::{format_rational, parse_rational, Rational};
use roundlab_core::products::{NtmParams, ProductCycleSpace};
use roundlab_core::{FiniteMetricSpace, Numerics};
use serde_json::{json, Value};

use crate::args::{ClassArgs, Command};
use crate::report::Outcome;

pub fn dispatch(command: &Command, numerics: &Numerics) -> Result<Outcome> {
    match command {
        Command::Gr { cmd } => gr::run(cmd, numerics),
        Command::Metric { cmd } => gr::run_metric(cmd, numerics),
        Command::Products { cmd } => products::run(cmd),
        Command::Obstruct { cmd } => obstruct::run(cmd),
        Command::Zspace { cmd } => zspace::run(cmd),
        Command::Inject { cmd } => inject::run(cmd, numerics),
        Command::Cayley { cmd } => cayley::run(cmd, numerics),
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_space(path: &Path) -> Result<FiniteMetricSpace> {
    FiniteMetricSpace::from_csv(&read_text(path)?)
        .with_context(|| format!("parsing {}", path.display()))
}

fn rational_arg(name: &str, text: &str) -> Result<Rational> {
    parse_rational(text).map_err(|e| anyhow!("--{name}: {e}"))
}

/// Comma-separated list of values.
fn list<T: FromStr>(name: &str, text: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|e| anyhow!("--{name}: {s:?}: {e}"))
        })
        .collect()
}

fn pair<T: FromStr + Copy>(name: &str, text: &str) -> Result<(T, T)>
where
    T::Err: std::fmt::Display,
{
    match list::<T>(name, text)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => bail!("--{name} takes two comma-separated values"),
    }
}

/// A class resolved to quanta.
struct Class {
    space: ProductCycleSpace,
    delta: u64,
    support: usize,
    size: usize,
    parameters: Value,
}

fn resolve_class(args: &ClassArgs) -> Result<Class> {
    if let Some(n) = args.n {
        let (t, m) = (args.t.unwrap_or(0), args.m.unwrap_or(1));
        let params = NtmParams::new(n, t, m)?;
        let size = args.size.unwrap_or(n as usize);
        info!(
            "M_{n}, t = {t}, m = {m}: delta = 2^{t} = {} quanta of {}, support = {} of {} coordinates",
            params.delta,
            format_rational(&params.space.cycle.quantum),
            params.support,
            params.space.coords
        );
        let parameters = json!({
            "ntm_form": { "n": n, "t": t, "m": m },
            "coords": params.space.coords,
            "units": params.space.units(),
            "quantum": format_rational(&params.space.cycle.quantum),
            "delta": params.delta,
            "delta_real": format_rational(&params.delta_real()),
            "support": params.support,
            "size": size,
            "warnings": params.warnings,
        });
        return Ok(Class {
            delta: params.delta,
            support: params.support,
            space: params.space,
            size,
            parameters,
        });
    }
    let need =
        |v: Option<u64>, name: &str| v.ok_or_else(|| anyhow!("--{name} is required (or give --n)"));
    let coords = need(args.coords.map(|v| v as u64), "coords")? as usize;
    let units = need(args.units, "units")?;
    let delta = need(args.delta, "delta")?;
    let support = need(args.support.map(|v| v as u64), "support")? as usize;
    let size = args.size.unwrap_or(2);
    let space = ProductCycleSpace::with_unit_quantum(coords, units)?;
    Ok(Class {
        space,
        delta,
        support,
        size,
        parameters: json!({
            "coords": coords,
            "units": units,
            "delta": delta,
            "support": support,
            "size": size,
        }),
    })
}

fn need_seed(seed: Option<u64>, what: &str) -> Result<u64> {
    seed.ok_or_else(|| anyhow!("{what} is randomized and needs --seed"))
}
