//! A-posteriori checks on traces.

use super::trace::SolverTrace;
use crate::bregman::bregman_entropy;
use crate::error::{Error, Result};
use crate::objective::ProblemInstance;

/// Relative slack in the monotone-descent check.
pub const MONOTONE_TOL: f64 = 1e-12;

/// Indices `k` with `f_{k+1} > f_k + MONOTONE_TOL · max(1, f_k)`.
pub fn monotonicity_violations(trace: &SolverTrace) -> Vec<usize> {
    trace
        .records
        .windows(2)
        .filter(|w| w[1].f > w[0].f + MONOTONE_TOL * w[0].f.max(1.0))
        .map(|w| w[0].iter)
        .collect()
}

/// Iterations whose accepted step violates `D_f ≤ L_k D_ψ`.
///
/// Both sides are recomputed in floating point from nearly equal values, so
/// the comparison allows an absolute slack of a few ulps of `f_{k−1}`.
pub fn backtracking_violations(trace: &SolverTrace) -> Vec<usize> {
    trace
        .records
        .windows(2)
        .filter_map(|w| {
            let (prev, cur) = (&w[0], &w[1]);
            let (d_f, d_psi) = (cur.d_f?, cur.d_psi?);
            let slack = 16.0 * f64::EPSILON * prev.f.abs();
            (d_f > cur.l_k * d_psi + slack).then_some(cur.iter)
        })
        .collect()
}

/// Outcome of [`verify_descent_inequality`].
#[derive(Debug, Clone, PartialEq)]
pub struct DescentReport {
    /// Entry `k` refers to the step `x_k → x_{k+1}`.
    pub holds: Vec<bool>,
}

impl DescentReport {
    pub fn all_hold(&self) -> bool {
        self.holds.iter().all(|&h| h)
    }

    pub fn violations(&self) -> Vec<usize> {
        self.holds
            .iter()
            .enumerate()
            .filter_map(|(k, &h)| (!h).then_some(k))
            .collect()
    }
}

/// Checks, at `u = x̄`, the per-step bound
/// `D_ψ(x̄, x_{k+1}) + γ_k f(x_{k+1}) ≤ D_ψ(x̄, x_k) − κ D_ψ(x_{k+1}, x_k) − γ_k D_f(x̄, x_k)`
/// on stored iterates. Needs the truth and `store_iterates`.
pub fn verify_descent_inequality(
    problem: &ProblemInstance,
    trace: &SolverTrace,
) -> Result<DescentReport> {
    let truth = problem
        .truth()
        .ok_or_else(|| Error::InvalidParameter("descent check needs the truth".into()))?;
    let iterates = trace
        .iterates
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("trace has no stored iterates".into()))?;
    let mut holds = Vec::with_capacity(iterates.len().saturating_sub(1));
    for (k, pair) in iterates.windows(2).enumerate() {
        let (x, next) = (&pair[0], &pair[1]);
        let gamma = trace.records[k + 1].gamma_k;
        let lhs = bregman_entropy(truth, next)? + gamma * problem.f_value(next)?;
        let d_far = bregman_entropy(truth, x)?;
        let rhs = d_far
            - trace.kappa * bregman_entropy(next, x)?
            - gamma * problem.bregman_f(truth, x)?;
        let slack = 1e-10 * lhs.abs().max(d_far.abs()).max(f64::MIN_POSITIVE);
        holds.push(lhs <= rhs + slack);
    }
    Ok(DescentReport { holds })
}
