//! JSON run reports.
//!
//! Every report carries a `provenance` header and the effective config
//! (`config` and its file form `config_text`). Wall-clock data lives only
//! under `timings`, so two runs of the same config give identical reports
//! once that key is removed.

use std::path::Path;

use samplet_core::SolveReport;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveSummary {
    pub method: &'static str,
    pub iterations: usize,
    pub converged: bool,
    pub final_active_size: usize,
    pub residual_inf: f64,
    pub objective: f64,
    pub block_nonzeros: Vec<usize>,
}

impl SolveSummary {
    pub fn of(r: &SolveReport) -> Self {
        Self {
            method: r.method.name(),
            iterations: r.iterations,
            converged: r.converged,
            final_active_size: r.final_active_size,
            residual_inf: r.residual_inf,
            objective: r.objective,
            block_nonzeros: r.block_nonzeros.clone(),
        }
    }
}

pub fn provenance(cfg: &RunConfig, command: &str) -> Value {
    json!({
        "tool": "samplet",
        "version": env!("CARGO_PKG_VERSION"),
        "core_version": samplet_core::VERSION,
        "command": command,
        "seed": cfg.seed,
        "threads": cfg.threads,
    })
}

/// Starts a report with the provenance header and config echo.
pub fn new_report(cfg: &RunConfig, command: &str) -> Result<serde_json::Map<String, Value>> {
    let mut m = serde_json::Map::new();
    m.insert("provenance".into(), provenance(cfg, command));
    m.insert("config".into(), serde_json::to_value(cfg)?);
    m.insert("config_text".into(), Value::String(cfg.to_text()));
    Ok(m)
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Copy of `report` without wall-clock data.
pub fn strip_timings(report: &Value) -> Value {
    let mut v = report.clone();
    if let Value::Object(m) = &mut v {
        m.remove("timings");
    }
    v
}
