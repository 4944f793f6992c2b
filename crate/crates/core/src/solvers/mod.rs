//! Mirror descent with backtracking, the Wirtinger-flow and Polyak
//! subgradient baselines, rate predictions and trace diagnostics.

mod baselines;
mod mirror_descent;
mod rate;
mod trace;
mod verify;

pub use baselines::{polyak_subgradient, wirtinger_flow};
pub use mirror_descent::mirror_descent;
pub use rate::{fit_linear_tail, predict_rate, theta_bound, RateFit, RateModel, RatePrediction};
pub(crate) use trace::fmt_f64;
pub use trace::{Algorithm, IterationRecord, SolverTrace, Status, TRACE_CSV_HEADER};
pub use verify::{
    backtracking_violations, monotonicity_violations, verify_descent_inequality, DescentReport,
    MONOTONE_TOL,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How mirror descent chooses `L_k` (and `γ_k = (1 − κ)/L_k`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepMode {
    /// Adaptive search on `D_f(x⁺, x) ≤ L_k D_ψ(x⁺, x)`.
    Backtracking,
    /// Fixed step `γ`; the trace reports `L_k = (1 − κ)/γ`.
    Constant(f64),
}

/// Step schedule of the Wirtinger-flow baseline:
/// `μ_k = min(1 − e^{−k/k0}, mu_max)`, applied as `μ_{k+1}/‖x₀‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WfSchedule {
    pub k0: f64,
    pub mu_max: f64,
}

impl Default for WfSchedule {
    fn default() -> Self {
        Self {
            k0: 330.0,
            mu_max: 0.4,
        }
    }
}

impl WfSchedule {
    pub fn mu(&self, k: usize) -> f64 {
        (1.0 - (-(k as f64) / self.k0).exp()).min(self.mu_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    pub kappa: f64,
    pub xi: f64,
    /// Initial `L_0`; defaults to the global relative smoothness constant.
    pub l0: Option<f64>,
    pub step_mode: StepMode,
    pub max_iters: usize,
    /// Stop once `‖∇f(x_k)‖ ≤ grad_tol`.
    pub grad_tol: f64,
    /// Stop once the relative error drops below this (needs the truth).
    pub success_tol: f64,
    /// Lower bound on `L_k`; defaults to `1e-8 · L_0`.
    pub l_floor: Option<f64>,
    /// Maximum number of trial steps per outer iteration.
    pub inner_max: usize,
    /// Keep every iterate in the trace.
    pub store_iterates: bool,
    pub wf: WfSchedule,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            kappa: 0.01,
            xi: 2.0,
            l0: None,
            step_mode: StepMode::Backtracking,
            max_iters: 1000,
            grad_tol: 1e-12,
            success_tol: 1e-5,
            l_floor: None,
            inner_max: 100,
            store_iterates: false,
            wf: WfSchedule::default(),
        }
    }
}

impl SolverParams {
    /// Constant step `γ` with the remaining defaults.
    pub fn constant(gamma: f64) -> Self {
        Self {
            step_mode: StepMode::Constant(gamma),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return bad(format!("kappa must lie in (0, 1), got {}", self.kappa));
        }
        if !(self.xi >= 1.0 && self.xi.is_finite()) {
            return bad(format!("xi must be >= 1, got {}", self.xi));
        }
        match self.step_mode {
            StepMode::Backtracking if self.xi <= 1.0 => {
                return bad("backtracking needs xi > 1".into());
            }
            StepMode::Constant(g) if !(g > 0.0 && g.is_finite()) => {
                return bad(format!("constant step must be positive, got {g}"));
            }
            _ => {}
        }
        if let Some(l) = self.l0 {
            if !(l > 0.0 && l.is_finite()) {
                return bad(format!("L0 must be positive, got {l}"));
            }
        }
        if let Some(l) = self.l_floor {
            if !(l > 0.0 && l.is_finite()) {
                return bad(format!("L_floor must be positive, got {l}"));
            }
        }
        if self.grad_tol < 0.0 || self.success_tol < 0.0 {
            return bad("tolerances must be nonnegative".into());
        }
        if self.inner_max == 0 {
            return bad("inner_max must be >= 1".into());
        }
        Ok(())
    }
}
