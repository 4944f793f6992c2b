use super::trace::{Algorithm, IterationRecord, SolverTrace, Status};
use super::{SolverParams, StepMode};
use crate::bregman::{bregman_entropy, mirror_step};
use crate::error::{check_len, Error, Result};
use crate::objective::{relative_error, Evaluation, ProblemInstance};
use crate::signal::{distance, dot, norm, sub, RealSignal};

/// `x_{k+1} = x_k` up to rounding.
pub(super) fn is_stalled(next: &[f64], current: &[f64]) -> bool {
    distance(next, current) <= 4.0 * f64::EPSILON * norm(current).max(1.0)
}

pub(super) fn rel_err_of(problem: &ProblemInstance, x: &[f64]) -> Option<f64> {
    problem.truth().and_then(|t| relative_error(x, t).ok())
}

/// Stop test shared by all solvers; priority is error, gradient, stall, budget.
pub(super) fn stop_reason(
    params: &SolverParams,
    record: &IterationRecord,
    stalled: bool,
    steps: usize,
) -> Option<Status> {
    if record.rel_err.is_some_and(|e| e < params.success_tol) {
        Some(Status::ConvergedError)
    } else if record.grad_norm <= params.grad_tol {
        Some(Status::ConvergedGrad)
    } else if stalled {
        Some(Status::Stalled)
    } else if steps >= params.max_iters {
        Some(Status::MaxIters)
    } else {
        None
    }
}

struct Candidate {
    point: RealSignal,
    eval: Evaluation,
    d_f: f64,
    d_psi: f64,
}

fn candidate(
    problem: &ProblemInstance,
    x: &[f64],
    at_x: &Evaluation,
    gamma: f64,
) -> Result<Candidate> {
    let step = mirror_step(x, &at_x.gradient, gamma)?;
    let eval = problem.evaluate(&step.next_point)?;
    let d_f = eval.value - at_x.value - dot(&at_x.gradient, &sub(&step.next_point, x));
    let d_psi = bregman_entropy(&step.next_point, x)?;
    Ok(Candidate {
        point: step.next_point,
        eval,
        d_f,
        d_psi,
    })
}

/// Mirror descent `x_{k+1} = ∇ψ*(∇ψ(x_k) − γ_k ∇f(x_k))`.
///
/// In backtracking mode every outer iteration divides `L_k` by `ξ` until the
/// trial step violates `D_f(x_{k+1}, x_k) ≤ L_k D_ψ(x_{k+1}, x_k)`, then backs
/// off by one factor `ξ`. `L_k` is warm-started from the previous iteration,
/// so the value backed off to may not have been tested at `x_k`; it is then
/// multiplied by `ξ` until the inequality holds, which terminates because the
/// global constant always satisfies it. The search never goes below
/// `L_floor` nor runs more than `inner_max` trials.
pub fn mirror_descent(
    problem: &ProblemInstance,
    x0: &[f64],
    params: &SolverParams,
) -> Result<SolverTrace> {
    params.validate()?;
    check_len(problem.n(), x0.len())?;
    let kappa = params.kappa;
    let l_global = problem.relative_smoothness_bound().l_global;
    let mut l_k = match params.step_mode {
        StepMode::Constant(gamma) => (1.0 - kappa) / gamma,
        StepMode::Backtracking => params.l0.unwrap_or(l_global),
    };
    let l_floor = params.l_floor.unwrap_or(1e-8 * l_k);
    let gamma_of = |l: f64| (1.0 - kappa) / l;

    let mut x = RealSignal::new(x0.to_vec())?;
    let mut at_x = problem.evaluate(&x)?;
    let mut records = vec![IterationRecord {
        iter: 0,
        f: at_x.value,
        grad_norm: norm(&at_x.gradient),
        l_k,
        gamma_k: gamma_of(l_k),
        backtracks: 0,
        rel_err: rel_err_of(problem, &x),
        d_f: None,
        d_psi: None,
    }];
    let mut iterates = params.store_iterates.then(|| vec![x.clone()]);
    let mut stalled = false;

    let status = loop {
        let steps = records.len() - 1;
        if !at_x.value.is_finite() {
            break Status::NonFinite;
        }
        if let Some(s) = stop_reason(params, records.last().unwrap(), stalled, steps) {
            break s;
        }

        let mut backtracks = 0;
        let step = (|| -> Result<Candidate> {
            Ok(match params.step_mode {
                StepMode::Constant(gamma) => candidate(problem, &x, &at_x, gamma)?,
                StepMode::Backtracking => {
                    let mut accepted: Option<Candidate> = None;
                    while backtracks < params.inner_max && l_k / params.xi >= l_floor {
                        let trial_l = l_k / params.xi;
                        let trial = candidate(problem, &x, &at_x, gamma_of(trial_l))?;
                        backtracks += 1;
                        if !(trial.d_f <= trial_l * trial.d_psi) {
                            break;
                        }
                        l_k = trial_l;
                        accepted = Some(trial);
                    }
                    let mut step = match accepted {
                        Some(c) => c,
                        None => candidate(problem, &x, &at_x, gamma_of(l_k))?,
                    };
                    while !(step.d_f <= l_k * step.d_psi) && l_k < l_global {
                        l_k = (l_k * params.xi).min(l_global);
                        step = candidate(problem, &x, &at_x, gamma_of(l_k))?;
                        backtracks += 1;
                    }
                    step
                }
            })
        })();
        let next = match step {
            Ok(c) => c,
            Err(Error::NonFinite(_)) => break Status::NonFinite,
            Err(e) => return Err(e),
        };

        stalled = is_stalled(&next.point, &x);
        records.push(IterationRecord {
            iter: steps + 1,
            f: next.eval.value,
            grad_norm: norm(&next.eval.gradient),
            l_k,
            gamma_k: gamma_of(l_k),
            backtracks,
            rel_err: rel_err_of(problem, &next.point),
            d_f: Some(next.d_f),
            d_psi: Some(next.d_psi),
        });
        if let Some(v) = iterates.as_mut() {
            v.push(next.point.clone());
        }
        x = next.point;
        at_x = next.eval;
    };

    Ok(SolverTrace {
        algorithm: Algorithm::MirrorDescent,
        kappa,
        records,
        status,
        final_point: x,
        iterates,
    })
}
