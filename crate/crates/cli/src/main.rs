//! `roundlab`: every verification routine behind one command line, with JSON
//! reports and verdict exit codes (0 clean, 2 violation found, 1 error).

mod args;
mod commands;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use log::{error, info};
use roundlab_core::Numerics;
use serde_json::json;

use args::Cli;
use report::{Report, SCHEMA};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap's own exit code for usage errors is 2, which is reserved here
    // for verdicts.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(workers) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build_global()
        {
            error!("could not size the worker pool: {e}");
            return ExitCode::from(1);
        }
    }
    let numerics = Numerics::default()
        .with_precision(cli.precision)
        .with_tolerance(cli.tolerance);
    let name = cli.command.name();
    info!("running {name}");
    let started = Instant::now();
    let outcome = commands::dispatch(&cli.command, &numerics);
    let wall_time_ms = started.elapsed().as_millis() as u64;

    let (report, code) = match outcome {
        Ok(o) => {
            let mut provenance = o.provenance;
            provenance["version"] = json!(env!("CARGO_PKG_VERSION"));
            provenance["numerics"] = json!(numerics);
            let code = if o.violation { 2 } else { 0 };
            let report = Report {
                schema: SCHEMA,
                command: name,
                parameters: o.parameters,
                results: o.results,
                provenance,
                wall_time_ms,
            };
            (report, code)
        }
        Err(e) => {
            error!("{e:#}");
            let report = Report {
                schema: SCHEMA,
                command: name,
                parameters: json!({}),
                results: json!({ "error": format!("{e:#}") }),
                provenance: json!({ "version": env!("CARGO_PKG_VERSION") }),
                wall_time_ms,
            };
            (report, 1)
        }
    };
    if let Err(e) = report.write(cli.out.as_deref()) {
        error!("{e:#}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
