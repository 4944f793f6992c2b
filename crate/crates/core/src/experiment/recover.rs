use std::path::PathBuf;

use serde_json::json;

use super::config::{ExperimentConfig, LogBase};
use super::io::write_text;
use super::trial::{run_trial, TrialRun};
use crate::error::Result;

/// Files written by a single run.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub run: TrialRun,
    pub trace_path: PathBuf,
    pub status_path: PathBuf,
}

pub(crate) fn log_base_note(base: LogBase) -> &'static str {
    match base {
        LogBase::E => "sample-size formulas use the natural logarithm",
        LogBase::Two => "sample-size formulas use log base 2",
        LogBase::Ten => "sample-size formulas use log base 10",
    }
}

/// Metadata shared by every status sidecar.
pub(crate) fn status_extra(
    cfg: &ExperimentConfig,
    run: &TrialRun,
    count: usize,
) -> Result<serde_json::Value> {
    Ok(json!({
        "config": serde_json::to_value(cfg)?,
        "log_base": cfg.log_base,
        "log_base_decision": log_base_note(cfg.log_base),
        "n": run.problem.n(),
        "measurement_count": count,
        "m": run.problem.m(),
        "seeds": run.seeds,
        "spectral": run.spectral,
        "spectral_warning": run.spectral.is_some_and(|s| !s.converged),
        "success_tol": cfg.success_tol,
        "success": run.succeeded(cfg.success_tol),
    }))
}

/// Single recovery: generates model and truth, runs the configured solver and
/// writes `trace.csv` and `status.json` into `cfg.output`.
pub fn cmd_recover(cfg: &ExperimentConfig) -> Result<RunArtifacts> {
    cfg.validate()?;
    let n = cfg.signal_len();
    let count = cfg.measurements.resolve(n, cfg.log_base);
    let run = run_trial(cfg, n, count, cfg.trial)?;
    let trace_path = cfg.output.join("trace.csv");
    let status_path = cfg.output.join("status.json");
    let mut csv = Vec::new();
    run.trace.write_csv(&mut csv)?;
    write_text(
        &trace_path,
        std::str::from_utf8(&csv).expect("csv is utf-8"),
    )?;
    let extra = status_extra(cfg, &run, count)?;
    write_text(&status_path, &(run.trace.status_json(Some(&extra))? + "\n"))?;
    Ok(RunArtifacts {
        run,
        trace_path,
        status_path,
    })
}
