use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::initialization::SpectralConfig;
use crate::measurements::ModelKind;
use crate::solvers::{SolverParams, StepMode, WfSchedule};

/// Base of the logarithm in sample-size formulas such as `2 n log³ n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum LogBase {
    #[default]
    #[serde(rename = "e")]
    E,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "10")]
    Ten,
}

impl LogBase {
    pub fn log(self, v: f64) -> f64 {
        match self {
            Self::E => v.ln(),
            Self::Two => v.log2(),
            Self::Ten => v.log10(),
        }
    }
}

/// Number of measurements (Gaussian) or masks (CDP).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SampleSize {
    Count(usize),
    /// `⌈factor · n^n_power · log(n)^log_power⌉`
    Scaled {
        factor: f64,
        #[serde(default)]
        n_power: u32,
        #[serde(default)]
        log_power: u32,
    },
}

impl SampleSize {
    pub fn resolve(&self, n: usize, base: LogBase) -> usize {
        match *self {
            Self::Count(c) => c,
            Self::Scaled {
                factor,
                n_power,
                log_power,
            } => {
                let nf = n as f64;
                (factor * nf.powi(n_power as i32) * base.log(nf).powi(log_power as i32)).ceil()
                    as usize
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmChoice {
    Md,
    Wf,
    Polyak,
}

impl AlgorithmChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Md => "md",
            Self::Wf => "wf",
            Self::Polyak => "polyak",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitChoice {
    Random,
    Spectral,
}

impl InitChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Random => "random",
            Self::Spectral => "spectral",
        }
    }
}

/// Everything an experiment needs; together with `master_seed` it determines
/// every output byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    /// Signal length (ignored when `grid` is set).
    pub n: usize,
    /// `(h, w)` for 2D signals; `n = h · w`.
    pub grid: Option<(usize, usize)>,
    /// `m` for Gaussian models, `P` for CDP.
    pub measurements: SampleSize,
    pub log_base: LogBase,
    pub algorithm: AlgorithmChoice,
    pub init: InitChoice,
    /// Random starts are uniform on `[−init_scale, init_scale]ⁿ`.
    pub init_scale: f64,
    pub step_mode: StepMode,
    pub kappa: f64,
    pub xi: f64,
    pub max_iters: usize,
    pub grad_tol: f64,
    /// Success threshold on the relative error.
    pub success_tol: f64,
    pub power_iters_max: usize,
    pub power_tol: f64,
    pub wf: WfSchedule,
    pub master_seed: u64,
    pub trials: usize,
    /// Trial index run by `recover`.
    pub trial: usize,
    /// Phase diagram rows.
    pub n_list: Vec<usize>,
    /// Phase diagram columns as absolute `m` (Gaussian) or `P` (CDP) values.
    pub m_list: Vec<usize>,
    /// Phase diagram columns as multiples of `n` (appended to `m_list`).
    pub m_ratios: Vec<f64>,
    /// Gaussian blur width (pixels) of the simulated surface; 0 is white noise.
    pub smoothing_length: f64,
    /// Worker threads for trials; defaults to the available cores.
    pub jobs: Option<usize>,
    /// Output directory (recover, surface2d) or CSV file (phase-diagram).
    pub output: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::Gaussian,
            n: 128,
            grid: None,
            measurements: SampleSize::Scaled {
                factor: 2.0,
                n_power: 1,
                log_power: 3,
            },
            log_base: LogBase::E,
            algorithm: AlgorithmChoice::Md,
            init: InitChoice::Random,
            init_scale: 1.0,
            step_mode: StepMode::Constant(0.99 / 3.0),
            kappa: 0.01,
            xi: 2.0,
            max_iters: 600,
            grad_tol: 0.0,
            success_tol: 1e-5,
            power_iters_max: 200,
            power_tol: 1e-8,
            wf: WfSchedule::default(),
            master_seed: 0,
            trials: 1,
            trial: 0,
            n_list: Vec::new(),
            m_list: Vec::new(),
            m_ratios: Vec::new(),
            smoothing_length: 0.0,
            jobs: None,
            output: PathBuf::from("out"),
        }
    }
}

/// Largest `m = n · P` (or `m · n` matrix entries) accepted, to bound memory.
pub const MAX_PROBLEM_ENTRIES: usize = 1 << 27;

impl ExperimentConfig {
    /// Effective signal length.
    pub fn signal_len(&self) -> usize {
        self.grid.map_or(self.n, |(h, w)| h * w)
    }

    pub fn solver_params(&self) -> SolverParams {
        SolverParams {
            kappa: self.kappa,
            xi: self.xi,
            step_mode: self.step_mode,
            max_iters: self.max_iters,
            grad_tol: self.grad_tol,
            success_tol: self.success_tol,
            wf: self.wf,
            ..SolverParams::default()
        }
    }

    pub fn spectral_config(&self, seed: u64) -> SpectralConfig {
        SpectralConfig {
            power_iters_max: self.power_iters_max,
            power_tol: self.power_tol,
            seed,
        }
    }

    /// Phase diagram columns for signal length `n`, in order.
    pub fn diagram_counts(&self, n: usize) -> Vec<usize> {
        let mut out = self.m_list.clone();
        out.extend(
            self.m_ratios
                .iter()
                .map(|r| (r * n as f64).round() as usize),
        );
        out
    }

    /// Checks every field; run before any computation.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if let Some((h, w)) = self.grid {
            if h == 0 || w == 0 {
                return bad(format!("grid must be nonempty, got {h} x {w}"));
            }
            if self.model != ModelKind::Cdp {
                return bad("2D grids are only supported by the cdp model".into());
            }
        } else if self.n == 0 {
            return bad("n must be >= 1".into());
        }
        if let SampleSize::Scaled { factor, .. } = self.measurements {
            if !(factor > 0.0 && factor.is_finite()) {
                return bad(format!("measurement factor must be positive, got {factor}"));
            }
        }
        self.solver_params().validate()?;
        self.spectral_config(0).validate()?;
        if !(self.success_tol > 0.0) {
            return bad("success_tol must be positive".into());
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return bad(format!(
                "init_scale must be finite and >= 0, got {}",
                self.init_scale
            ));
        }
        if !(self.smoothing_length >= 0.0 && self.smoothing_length.is_finite()) {
            return bad("smoothing_length must be finite and >= 0".into());
        }
        if !(self.wf.k0 > 0.0 && self.wf.mu_max > 0.0) {
            return bad("wf schedule needs k0 > 0 and mu_max > 0".into());
        }
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.jobs == Some(0) {
            return bad("jobs must be >= 1".into());
        }
        if self.m_ratios.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return bad("m_ratios must be finite and nonnegative".into());
        }
        if self.n_list.contains(&0) {
            return bad("n_list entries must be >= 1".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_size_formulas() {
        let gauss = SampleSize::Scaled {
            factor: 2.0,
            n_power: 1,
            log_power: 3,
        };
        assert_eq!(gauss.resolve(128, LogBase::E), 29_243);
        assert_eq!(gauss.resolve(128, LogBase::Two), 2 * 128 * 343);
        let spectral = SampleSize::Scaled {
            factor: 2.0,
            n_power: 1,
            log_power: 1,
        };
        assert_eq!(spectral.resolve(128, LogBase::E), 1243);
        let masks = SampleSize::Scaled {
            factor: 7.0,
            n_power: 0,
            log_power: 3,
        };
        assert_eq!(masks.resolve(128, LogBase::E), 800);
        assert_eq!(SampleSize::Count(17).resolve(128, LogBase::Ten), 17);
    }

    #[test]
    fn json_round_trip_and_untagged_sizes() {
        let cfg = ExperimentConfig {
            grid: Some((4, 8)),
            model: ModelKind::Cdp,
            measurements: SampleSize::Count(5),
            step_mode: StepMode::Backtracking,
            n_list: vec![16, 32],
            m_ratios: vec![2.0, 4.0],
            jobs: Some(3),
            ..Default::default()
        };
        let back = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg);
        let parsed = ExperimentConfig::from_json(
            r#"{"measurements": {"factor": 7, "log_power": 3}, "log_base": "2"}"#,
        )
        .unwrap();
        assert_eq!(parsed.log_base, LogBase::Two);
        assert_eq!(parsed.measurements.resolve(128, LogBase::Two), 7 * 343);
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        let cfg = ExperimentConfig {
            trials: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig {
            grid: Some((4, 4)),
            ..Default::default()
        };
        assert!(cfg.validate().is_err(), "grids need the cdp model");
        let cfg = ExperimentConfig {
            kappa: 2.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig {
            m_ratios: vec![-1.0],
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn diagram_columns() {
        let cfg = ExperimentConfig {
            m_list: vec![0, 10],
            m_ratios: vec![2.0, 4.5],
            ..Default::default()
        };
        assert_eq!(cfg.diagram_counts(16), vec![0, 10, 32, 72]);
    }
}
