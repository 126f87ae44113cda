use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const SCHEMA: u32 = 1;

/// What a command hands back to the orchestrator.
pub struct Outcome {
    pub parameters: Value,
    pub results: Value,
    /// Seeds, budgets and exhaustive/sampled flags.
    pub provenance: Value,
    /// A checked inequality or axiom failed.
    pub violation: bool,
}

impl Outcome {
    pub fn new(parameters: Value, results: impl Serialize, violation: bool) -> Result<Self> {
        Ok(Self {
            parameters,
            results: serde_json::to_value(results)?,
            provenance: json!({}),
            violation,
        })
    }

    pub fn with_provenance(mut self, provenance: Value) -> Self {
        self.provenance = provenance;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub parameters: Value,
    pub results: Value,
    pub provenance: Value,
    pub wall_time_ms: u64,
}

impl Report {
    pub fn write(&self, out: Option<&Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        match out {
            Some(path) => {
                std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
            }
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                lock.write_all(text.as_bytes())?;
                Ok(lock.flush()?)
            }
        }
    }
}
