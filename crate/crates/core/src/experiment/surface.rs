use std::path::PathBuf;

use super::config::{ExperimentConfig, InitChoice};
use super::io::{align_sign, write_grid_csv, write_text};
use super::recover::status_extra;
use super::trial::{run_trial, TrialRun};
use crate::error::{Error, Result};
use crate::measurements::ModelKind;

/// Outputs of a 2D surface recovery.
#[derive(Debug, Clone)]
pub struct SurfaceArtifacts {
    pub run: TrialRun,
    /// Largest pixel deviation of the sign-aligned reconstruction, relative
    /// to `‖x̄‖∞`.
    pub max_pixel_dev: f64,
    pub truth_path: PathBuf,
    pub reconstruction_path: PathBuf,
    pub trace_path: PathBuf,
    pub status_path: PathBuf,
}

/// Recovers a simulated `h × w` surface from CDP measurements with a random
/// start. Writes `truth.csv`, `reconstruction.csv` (sign aligned), `trace.csv`
/// and `status.json` into `cfg.output`.
pub fn cmd_surface2d(cfg: &ExperimentConfig) -> Result<SurfaceArtifacts> {
    cfg.validate()?;
    let Some((h, w)) = cfg.grid else {
        return Err(Error::InvalidParameter("surface2d needs a grid".into()));
    };
    if cfg.model != ModelKind::Cdp || cfg.init != InitChoice::Random {
        return Err(Error::InvalidParameter(
            "surface2d runs the cdp model from a random start".into(),
        ));
    }
    let n = h * w;
    let count = cfg.measurements.resolve(n, cfg.log_base);
    let run = run_trial(cfg, n, count, cfg.trial)?;
    let truth = run.problem.truth().expect("trial keeps its truth");
    let recon = align_sign(&run.trace.final_point, truth);
    let scale = truth.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let max_pixel_dev = recon
        .iter()
        .zip(truth.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale;

    let out = &cfg.output;
    let truth_path = out.join("truth.csv");
    let reconstruction_path = out.join("reconstruction.csv");
    let trace_path = out.join("trace.csv");
    let status_path = out.join("status.json");
    write_grid_csv(&truth_path, truth, h, w)?;
    write_grid_csv(&reconstruction_path, &recon, h, w)?;
    let mut csv = Vec::new();
    run.trace.write_csv(&mut csv)?;
    write_text(
        &trace_path,
        std::str::from_utf8(&csv).expect("csv is utf-8"),
    )?;
    let mut extra = status_extra(cfg, &run, count)?;
    extra["grid"] = serde_json::json!([h, w]);
    extra["max_pixel_dev"] = serde_json::json!(max_pixel_dev);
    write_text(&status_path, &(run.trace.status_json(Some(&extra))? + "\n"))?;
    Ok(SurfaceArtifacts {
        run,
        max_pixel_dev,
        truth_path,
        reconstruction_path,
        trace_path,
        status_path,
    })
}
