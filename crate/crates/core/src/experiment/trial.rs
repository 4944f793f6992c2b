use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::config::{AlgorithmChoice, ExperimentConfig, InitChoice, MAX_PROBLEM_ENTRIES};
use crate::error::{Error, Result};
use crate::initialization::{random_init, spectral_init};
use crate::measurements::{make_cdp, make_gaussian, MeasurementModel, ModelKind};
use crate::objective::ProblemInstance;
use crate::rng::{derive_seed, rng_from_seed, stream};
use crate::signal::{norm, RealSignal};
use crate::solvers::{mirror_descent, polyak_subgradient, wirtinger_flow, SolverTrace};

/// Seeds of one trial, all derived from `(master_seed, n, count, trial)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialSeeds {
    pub trial: u64,
    pub model: u64,
    pub truth: u64,
    pub init: u64,
    pub power: u64,
}

impl TrialSeeds {
    pub fn derive(master_seed: u64, n: usize, count: usize, trial: usize) -> Self {
        let t = derive_seed(master_seed, &[n as u64, count as u64, trial as u64]);
        Self {
            trial: t,
            model: derive_seed(t, &[stream::MODEL]),
            truth: derive_seed(t, &[stream::TRUTH]),
            init: derive_seed(t, &[stream::INIT]),
            power: derive_seed(t, &[stream::POWER]),
        }
    }
}

/// Unit-norm Gaussian direction.
pub fn unit_truth(n: usize, seed: u64) -> Result<RealSignal> {
    let mut rng = rng_from_seed(seed);
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let s = norm(&v);
        if s > 0.0 {
            return RealSignal::new(v.into_iter().map(|c| c / s).collect());
        }
    }
}

/// `h × w` field of i.i.d. standard normal pixels, row-major. With
/// `smoothing_length > 0` it is blurred by a periodic Gaussian kernel of that
/// width, normalized so each pixel keeps unit variance.
pub fn surface_truth(h: usize, w: usize, smoothing_length: f64, seed: u64) -> Result<RealSignal> {
    let mut rng = rng_from_seed(seed);
    let mut field: Vec<f64> = (0..h * w).map(|_| rng.sample(StandardNormal)).collect();
    if smoothing_length > 0.0 {
        let kernel = |len: usize| -> Vec<(isize, f64)> {
            let reach = ((4.0 * smoothing_length).ceil() as isize).min(len as isize / 2);
            let taps: Vec<(isize, f64)> = (-reach..=reach)
                .map(|d| {
                    let z = d as f64 / smoothing_length;
                    (d, (-0.5 * z * z).exp())
                })
                .collect();
            let energy: f64 = taps.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
            taps.into_iter().map(|(d, v)| (d, v / energy)).collect()
        };
        let (kr, kc) = (kernel(w), kernel(h));
        let mut tmp = vec![0.0; h * w];
        for i in 0..h {
            for j in 0..w {
                tmp[i * w + j] = kr
                    .iter()
                    .map(|&(d, v)| {
                        v * field[i * w + (j as isize + d).rem_euclid(w as isize) as usize]
                    })
                    .sum();
            }
        }
        for i in 0..h {
            for j in 0..w {
                field[i * w + j] = kc
                    .iter()
                    .map(|&(d, v)| {
                        v * tmp[(i as isize + d).rem_euclid(h as isize) as usize * w + j]
                    })
                    .sum();
            }
        }
    }
    RealSignal::new(field)
}

/// Builds the measurement model for `n` and `count` (`m` or `P`).
pub fn build_model(
    cfg: &ExperimentConfig,
    n: usize,
    count: usize,
    seed: u64,
) -> Result<MeasurementModel> {
    if n.checked_mul(count).is_none_or(|e| e > MAX_PROBLEM_ENTRIES) {
        return Err(Error::InvalidSize(format!(
            "problem with n = {n} and {count} measurements/masks exceeds the limit of {MAX_PROBLEM_ENTRIES} entries"
        )));
    }
    Ok(match cfg.model {
        ModelKind::Gaussian => make_gaussian(n, count, seed)?.into(),
        ModelKind::Cdp => make_cdp(n, count, seed, cfg.grid)?.into(),
    })
}

/// Diagnostics of a spectral start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralSummary {
    pub lambda: f64,
    pub eigenvalue: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Result of one seeded run.
#[derive(Debug, Clone)]
pub struct TrialRun {
    pub seeds: TrialSeeds,
    pub problem: ProblemInstance,
    pub x0: RealSignal,
    pub spectral: Option<SpectralSummary>,
    pub trace: SolverTrace,
}

impl TrialRun {
    /// Relative error of the final iterate is below `success_tol`.
    pub fn succeeded(&self, success_tol: f64) -> bool {
        self.trace.final_rel_err().is_some_and(|e| e < success_tol)
    }
}

/// Runs trial `trial` of the cell `(n, count)`. The truth is a unit-norm
/// direction, or a [`surface_truth`] field when the config has a grid.
pub fn run_trial(cfg: &ExperimentConfig, n: usize, count: usize, trial: usize) -> Result<TrialRun> {
    let seeds = TrialSeeds::derive(cfg.master_seed, n, count, trial);
    let model = build_model(cfg, n, count, seeds.model)?;
    let truth = match cfg.grid {
        Some((h, w)) => surface_truth(h, w, cfg.smoothing_length, seeds.truth)?,
        None => unit_truth(n, seeds.truth)?,
    };
    let problem = ProblemInstance::from_truth(model, truth)?;
    let (x0, spectral) = match cfg.init {
        InitChoice::Random => (random_init(n, cfg.init_scale, seeds.init), None),
        InitChoice::Spectral => {
            let s = spectral_init(&problem, &cfg.spectral_config(seeds.power))?;
            let summary = SpectralSummary {
                lambda: s.lambda,
                eigenvalue: s.eigenvalue,
                iterations: s.iterations,
                converged: s.converged,
            };
            (s.x0, Some(summary))
        }
    };
    let params = cfg.solver_params();
    let trace = match cfg.algorithm {
        AlgorithmChoice::Md => mirror_descent(&problem, &x0, &params)?,
        AlgorithmChoice::Wf => wirtinger_flow(&problem, &x0, &params)?,
        AlgorithmChoice::Polyak => polyak_subgradient(&problem, &x0, &params)?,
    };
    Ok(TrialRun {
        seeds,
        problem,
        x0,
        spectral,
        trace,
    })
}
