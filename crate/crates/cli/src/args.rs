use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

#[derive(Debug, Parser)]
#[command(
    name = "mirror-pr",
    version,
    about = "Phase retrieval by mirror descent"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recover one seeded signal and write trace.csv and status.json.
    Recover(ExperimentArgs),
    /// Monte-Carlo success rates over an (n, m) grid.
    PhaseDiagram(ExperimentArgs),
    /// Recover a simulated 2D surface from coded diffraction patterns.
    Surface2d(ExperimentArgs),
    /// Fit the linear tail of a trace's relative errors against a predicted rate.
    RateFit(RateFitArgs),
    /// Run the built-in invariant checks.
    Selftest,
}

/// Flags named after the fields of the experiment config. Values from
/// `--config` take precedence over flags.
#[derive(Debug, Args, Default)]
pub struct ExperimentArgs {
    /// JSON config file; its fields override the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = ["gaussian", "cdp"])]
    pub model: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Grid shape as HxW (2D signals, cdp only).
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,
    /// m (gaussian) or P (cdp): an integer or JSON such as
    /// '{"factor":2,"n_power":1,"log_power":3}'.
    #[arg(long, value_parser = parse_json_or_int)]
    pub measurements: Option<Value>,
    #[arg(long, value_parser = ["e", "2", "10"])]
    pub log_base: Option<String>,
    #[arg(long, value_parser = ["md", "wf", "polyak"])]
    pub algorithm: Option<String>,
    #[arg(long, value_parser = ["random", "spectral"])]
    pub init: Option<String>,
    #[arg(long)]
    pub init_scale: Option<f64>,
    /// "backtracking", "constant:<gamma>" or a bare step size.
    #[arg(long, value_parser = parse_step_mode)]
    pub step_mode: Option<Value>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub grad_tol: Option<f64>,
    #[arg(long)]
    pub success_tol: Option<f64>,
    #[arg(long)]
    pub power_iters_max: Option<usize>,
    #[arg(long)]
    pub power_tol: Option<f64>,
    #[arg(long)]
    pub master_seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub trial: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub m_list: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub m_ratios: Option<Vec<f64>>,
    #[arg(long)]
    pub smoothing_length: Option<f64>,
    /// Worker threads for trials (default: available cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl ExperimentArgs {
    /// The flags that were given, as config fields.
    pub fn to_json(&self) -> Map<String, Value> {
        let mut m = Map::new();
        macro_rules! put {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    m.insert(stringify!($field).to_string(), json!(v));
                }
            )*};
        }
        put!(
            model,
            n,
            grid,
            measurements,
            log_base,
            algorithm,
            init,
            init_scale,
            step_mode,
            kappa,
            xi,
            max_iters,
            grad_tol,
            success_tol,
            power_iters_max,
            power_tol,
            master_seed,
            trials,
            trial,
            n_list,
            m_list,
            m_ratios,
            smoothing_length,
            jobs,
            output
        );
        m
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RateModelArg {
    Gaussian,
    Cdp,
}

#[derive(Debug, Args)]
pub struct RateFitArgs {
    /// Trace CSV with a rel_err column.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// JSON file with the same fields as the flags; overrides them.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Rate model used for the prediction; omit to only fit.
    #[arg(long)]
    pub model: Option<RateModelArg>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub varrho: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub l_i: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub norm_truth: Option<f64>,
    /// Fraction of ln(1 − ν) the fitted rate may give up.
    #[arg(long)]
    pub log_margin: Option<f64>,
    /// Write the report JSON here as well as to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl RateFitArgs {
    pub fn to_json(&self) -> Map<String, Value> {
        let mut m = Map::new();
        macro_rules! put {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    m.insert(stringify!($field).to_string(), json!(v));
                }
            )*};
        }
        put!(trace, model, lambda, varrho, delta, l_i, kappa, norm_truth, log_margin, output);
        m
    }
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (h, w) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected HxW, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(h)?, parse(w)?))
}

fn parse_json_or_int(s: &str) -> Result<Value, String> {
    if let Ok(c) = s.trim().parse::<usize>() {
        return Ok(json!(c));
    }
    serde_json::from_str(s).map_err(|e| format!("expected an integer or JSON object: {e}"))
}

fn parse_step_mode(s: &str) -> Result<Value, String> {
    let s = s.trim();
    if s == "backtracking" {
        return Ok(json!("backtracking"));
    }
    let g = s.strip_prefix("constant:").unwrap_or(s);
    g.parse::<f64>()
        .map(|g| json!({ "constant": g }))
        .map_err(|_| format!("expected backtracking, constant:<gamma> or a number, got {s:?}"))
}
