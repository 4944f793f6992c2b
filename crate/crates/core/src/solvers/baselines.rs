//! Baselines: Wirtinger flow on the same smooth objective and the Polyak
//! subgradient method on `g(x) = (1/m) Σ_r |y[r] − |a_r* x|²|`.

use super::mirror_descent::{is_stalled, rel_err_of, stop_reason};
use super::trace::{Algorithm, IterationRecord, SolverTrace, Status};
use super::SolverParams;
use crate::error::{check_len, Error, Result};
use crate::measurements::MeasurementOperator;
use crate::objective::ProblemInstance;
use crate::signal::{norm, norm_sq, RealSignal};

/// Growth of `f` over its initial value treated as divergence.
const DIVERGENCE_FACTOR: f64 = 1e6;

/// Wirtinger flow `x_{k+1} = x_k − (μ_{k+1}/‖x₀‖²) ∇f(x_k)` with the schedule
/// in `params.wf`. The gradient is [`ProblemInstance::evaluate`], the same code
/// path mirror descent uses.
pub fn wirtinger_flow(
    problem: &ProblemInstance,
    x0: &[f64],
    params: &SolverParams,
) -> Result<SolverTrace> {
    params.validate()?;
    check_len(problem.n(), x0.len())?;
    let scale = norm_sq(x0);
    if scale == 0.0 {
        return Err(Error::InvalidParameter(
            "wirtinger flow needs a nonzero initial point".into(),
        ));
    }
    let mut x = RealSignal::new(x0.to_vec())?;
    let mut at_x = problem.evaluate(&x)?;
    let f0 = at_x.value;
    let gamma0 = params.wf.mu(1) / scale;
    let mut records = vec![IterationRecord {
        iter: 0,
        f: at_x.value,
        grad_norm: norm(&at_x.gradient),
        l_k: gamma0.recip(),
        gamma_k: gamma0,
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
        if at_x.value > DIVERGENCE_FACTOR * f0.max(f64::MIN_POSITIVE) {
            break Status::Stalled;
        }
        if let Some(s) = stop_reason(params, records.last().unwrap(), stalled, steps) {
            break s;
        }
        let gamma = params.wf.mu(steps + 1) / scale;
        let next: Vec<f64> = x
            .iter()
            .zip(at_x.gradient.iter())
            .map(|(xi, gi)| xi - gamma * gi)
            .collect();
        let next = RealSignal::from_vec_unchecked(next);
        stalled = is_stalled(&next, &x);
        at_x = problem.evaluate(&next)?;
        records.push(IterationRecord {
            iter: steps + 1,
            f: at_x.value,
            grad_norm: norm(&at_x.gradient),
            l_k: gamma.recip(),
            gamma_k: gamma,
            backtracks: 0,
            rel_err: rel_err_of(problem, &next),
            d_f: None,
            d_psi: None,
        });
        if let Some(v) = iterates.as_mut() {
            v.push(next.clone());
        }
        x = next;
    };

    Ok(SolverTrace {
        algorithm: Algorithm::WirtingerFlow,
        kappa: params.kappa,
        records,
        status,
        final_point: x,
        iterates,
    })
}

struct Subgradient {
    value: f64,
    direction: RealSignal,
}

/// `g(x)` and the subgradient `(2/m) Re(A* (sign(|Ax|² − y) ∘ Ax))`, with
/// `sign(0) = 0`.
fn subgradient(problem: &ProblemInstance, x: &[f64]) -> Result<Subgradient> {
    let model = problem.model();
    let ax = model.apply(x)?;
    let inv_m = 1.0 / problem.m() as f64;
    let mut value = 0.0;
    let signs: Vec<f64> = ax
        .modulus_sq()
        .iter()
        .zip(problem.intensities().iter())
        .map(|(a, y)| {
            let r = a - y;
            value += r.abs();
            if r > 0.0 {
                1.0
            } else if r < 0.0 {
                -1.0
            } else {
                0.0
            }
        })
        .collect();
    let mut direction = model.adjoint_real(&ax.scaled(&signs))?.into_vec();
    direction.iter_mut().for_each(|d| *d *= 2.0 * inv_m);
    Ok(Subgradient {
        value: value * inv_m,
        direction: RealSignal::from_vec_unchecked(direction),
    })
}

/// Polyak subgradient method `x_{k+1} = x_k − (g(x_k)/‖v_k‖²) v_k`, using that
/// the minimal value of `g` is zero for noiseless data.
pub fn polyak_subgradient(
    problem: &ProblemInstance,
    x0: &[f64],
    params: &SolverParams,
) -> Result<SolverTrace> {
    params.validate()?;
    check_len(problem.n(), x0.len())?;
    let mut x = RealSignal::new(x0.to_vec())?;
    let mut sub = subgradient(problem, &x)?;
    let step_of = |s: &Subgradient| {
        let v2 = norm_sq(&s.direction);
        if v2 > 0.0 {
            s.value / v2
        } else {
            0.0
        }
    };
    let mut gamma = step_of(&sub);
    let mut records = vec![IterationRecord {
        iter: 0,
        f: sub.value,
        grad_norm: norm(&sub.direction),
        l_k: gamma.recip(),
        gamma_k: gamma,
        backtracks: 0,
        rel_err: rel_err_of(problem, &x),
        d_f: None,
        d_psi: None,
    }];
    let mut iterates = params.store_iterates.then(|| vec![x.clone()]);
    let mut stalled = false;

    let status = loop {
        let steps = records.len() - 1;
        if !sub.value.is_finite() {
            break Status::NonFinite;
        }
        let record = records.last().unwrap();
        if record.rel_err.is_some_and(|e| e < params.success_tol) {
            break Status::ConvergedError;
        }
        if sub.value == 0.0 {
            break Status::ConvergedGrad;
        }
        // zero subgradient away from the minimum
        if record.grad_norm == 0.0 {
            break Status::Stalled;
        }
        if let Some(s) = stop_reason(params, record, stalled, steps) {
            break s;
        }
        let next: Vec<f64> = x
            .iter()
            .zip(sub.direction.iter())
            .map(|(xi, vi)| xi - gamma * vi)
            .collect();
        let next = RealSignal::from_vec_unchecked(next);
        stalled = is_stalled(&next, &x);
        sub = subgradient(problem, &next)?;
        gamma = step_of(&sub);
        records.push(IterationRecord {
            iter: steps + 1,
            f: sub.value,
            grad_norm: norm(&sub.direction),
            l_k: gamma.recip(),
            gamma_k: gamma,
            backtracks: 0,
            rel_err: rel_err_of(problem, &next),
            d_f: None,
            d_psi: None,
        });
        if let Some(v) = iterates.as_mut() {
            v.push(next.clone());
        }
        x = next;
    };

    Ok(SolverTrace {
        algorithm: Algorithm::Polyak,
        kappa: params.kappa,
        records,
        status,
        final_point: x,
        iterates,
    })
}
