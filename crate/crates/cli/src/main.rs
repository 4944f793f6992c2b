mod args;
mod selftest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use mirror_pr::experiment::{
    cmd_phase_diagram, cmd_rate_fit, cmd_recover, cmd_surface2d, ExperimentConfig,
};
use mirror_pr::solvers::{predict_rate, RateModel};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use args::{Cli, Command, ExperimentArgs, RateFitArgs};

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_SELFTEST: u8 = 3;

enum Failure {
    Config(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Runtime(_) => EXIT_RUNTIME,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Config(m) | Self::Runtime(m) => m,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

fn read_json_object(path: &Path) -> Result<Map<String, Value>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(config_err(format!(
            "{} is not a JSON object",
            path.display()
        ))),
        Err(e) => Err(config_err(format!("{}: {e}", path.display()))),
    }
}

/// Subcommand defaults, then flags, then the config file.
fn layered<T: for<'de> Deserialize<'de>>(
    defaults: Map<String, Value>,
    flags: Map<String, Value>,
    file: Option<&PathBuf>,
) -> Result<T, Failure> {
    let mut merged = defaults;
    merged.extend(flags);
    if let Some(path) = file {
        merged.extend(read_json_object(path)?);
    }
    serde_json::from_value(Value::Object(merged)).map_err(config_err)
}

fn experiment_config(args: &ExperimentArgs, defaults: Value) -> Result<ExperimentConfig, Failure> {
    let Value::Object(defaults) = defaults else {
        unreachable!("defaults are an object")
    };
    let cfg: ExperimentConfig = layered(defaults, args.to_json(), args.config.as_ref())?;
    cfg.validate().map_err(config_err)?;
    Ok(cfg)
}

fn print_json(v: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("values serialize")
    );
}

fn recover(args: &ExperimentArgs) -> Result<(), Failure> {
    let cfg = experiment_config(args, json!({}))?;
    let art = cmd_recover(&cfg).map_err(runtime_err)?;
    print_json(&json!({
        "status": art.run.trace.status,
        "iterations": art.run.trace.iterations(),
        "final_rel_err": art.run.trace.final_rel_err(),
        "success": art.run.succeeded(cfg.success_tol),
        "trace": art.trace_path,
        "status_file": art.status_path,
    }));
    Ok(())
}

fn phase_diagram(args: &ExperimentArgs) -> Result<(), Failure> {
    let defaults = json!({
        "init": "spectral",
        "step_mode": "backtracking",
        "max_iters": 2000,
        "trials": 50,
        "output": "phase_diagram.csv",
    });
    let cfg = experiment_config(args, defaults)?;
    let cells = cmd_phase_diagram(&cfg).map_err(runtime_err)?;
    print_json(&json!({ "cells": cells.len(), "output": cfg.output }));
    Ok(())
}

fn surface2d(args: &ExperimentArgs) -> Result<(), Failure> {
    let defaults = json!({
        "model": "cdp",
        "measurements": 100,
        "step_mode": { "constant": 0.99 / 2.0 },
        "max_iters": 3000,
        "output": "surface",
    });
    let cfg = experiment_config(args, defaults)?;
    let art = cmd_surface2d(&cfg).map_err(runtime_err)?;
    print_json(&json!({
        "status": art.run.trace.status,
        "iterations": art.run.trace.iterations(),
        "final_rel_err": art.run.trace.final_rel_err(),
        "max_pixel_dev": art.max_pixel_dev,
        "success": art.run.succeeded(cfg.success_tol),
        "truth": art.truth_path,
        "reconstruction": art.reconstruction_path,
        "trace": art.trace_path,
    }));
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RateFitConfig {
    trace: Option<PathBuf>,
    model: Option<String>,
    #[serde(default = "default_lambda")]
    lambda: f64,
    #[serde(default = "default_varrho")]
    varrho: f64,
    #[serde(default)]
    delta: f64,
    l_i: Option<f64>,
    #[serde(default = "default_kappa")]
    kappa: f64,
    #[serde(default = "one")]
    norm_truth: f64,
    #[serde(default = "half")]
    log_margin: f64,
    output: Option<PathBuf>,
}

fn default_lambda() -> f64 {
    0.9
}
fn default_varrho() -> f64 {
    0.1
}
fn default_kappa() -> f64 {
    0.01
}
fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}

fn rate_fit(args: &RateFitArgs) -> Result<(), Failure> {
    let cfg: RateFitConfig = layered(Map::new(), args.to_json(), args.config.as_ref())?;
    let trace = cfg
        .trace
        .ok_or_else(|| config_err("rate-fit needs --trace"))?;
    if !(0.0..1.0).contains(&cfg.log_margin) {
        return Err(config_err(format!(
            "log_margin must lie in [0, 1), got {}",
            cfg.log_margin
        )));
    }
    let model = match cfg.model.as_deref() {
        None => None,
        Some("gaussian") => Some(RateModel::Gaussian {
            lambda: cfg.lambda,
            varrho: cfg.varrho,
        }),
        Some("cdp") => Some(RateModel::Cdp {
            delta: cfg.delta,
            l_i: cfg.l_i,
        }),
        Some(other) => return Err(config_err(format!("unknown rate model {other:?}"))),
    };
    let prediction = model
        .map(|m| predict_rate(m, cfg.kappa, cfg.norm_truth))
        .transpose()
        .map_err(config_err)?;
    let report = cmd_rate_fit(&trace, prediction, cfg.log_margin).map_err(runtime_err)?;
    let text = serde_json::to_string_pretty(&report).map_err(runtime_err)?;
    if let Some(out) = &cfg.output {
        fs::write(out, format!("{text}\n")).map_err(runtime_err)?;
    }
    println!("{text}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Recover(a) => recover(a),
        Command::PhaseDiagram(a) => phase_diagram(a),
        Command::Surface2d(a) => surface2d(a),
        Command::RateFit(a) => rate_fit(a),
        Command::Selftest => {
            return if selftest::run() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_SELFTEST)
            };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
