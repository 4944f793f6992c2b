//! Predicted local linear rates and least-squares fits of measured ones.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs of a rate prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RateModel {
    /// `ν = (1−κ)(λ min(‖x̄‖², 1) − ϱ max(‖x̄‖²/3, 1)) / (3 + ϱ max(‖x̄‖²/3, 1))`,
    /// valid for `λ ∈ (0, 1)` and `0 < ϱ < λ min(‖x̄‖², 1) / (2 max(‖x̄‖²/3, 1))`.
    Gaussian { lambda: f64, varrho: f64 },
    /// `ν = (1−κ)(min(‖x̄‖², 1) − 2δ) / ((1+δ) L_i)` for `0 ≤ δ < min(‖x̄‖², 1)/2`.
    /// Without `l_i` the local estimate `L_i = 2(1+δ)²` is used.
    Cdp { delta: f64, l_i: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePrediction {
    pub nu: f64,
    pub model: RateModel,
    pub kappa: f64,
    pub norm_truth: f64,
}

impl RatePrediction {
    /// Predicted per-iteration contraction `1 − ν` of `dist²(x_k, {±x̄})`.
    pub fn factor(&self) -> f64 {
        1.0 - self.nu
    }
}

pub fn predict_rate(model: RateModel, kappa: f64, norm_truth: f64) -> Result<RatePrediction> {
    let bad = |msg: String| Err(Error::InvalidParameter(msg));
    if !(kappa > 0.0 && kappa < 1.0) {
        return bad(format!("kappa must lie in (0, 1), got {kappa}"));
    }
    if !(norm_truth > 0.0 && norm_truth.is_finite()) {
        return bad(format!("truth norm must be positive, got {norm_truth}"));
    }
    let s = norm_truth * norm_truth;
    let low = s.min(1.0);
    let nu = match model {
        RateModel::Gaussian { lambda, varrho } => {
            let high = (s / 3.0).max(1.0);
            if !(lambda > 0.0 && lambda < 1.0) {
                return bad(format!("lambda must lie in (0, 1), got {lambda}"));
            }
            let limit = lambda * low / (2.0 * high);
            if !(varrho > 0.0 && varrho < limit) {
                return bad(format!("varrho must lie in (0, {limit}), got {varrho}"));
            }
            (1.0 - kappa) * (lambda * low - varrho * high) / (3.0 + varrho * high)
        }
        RateModel::Cdp { delta, l_i } => {
            if !(delta >= 0.0 && delta < low / 2.0) {
                return bad(format!("delta must lie in [0, {}), got {delta}", low / 2.0));
            }
            let l = l_i.unwrap_or(2.0 * (1.0 + delta).powi(2));
            if !(l > 0.0 && l.is_finite()) {
                return bad(format!("L_i must be positive, got {l}"));
            }
            (1.0 - kappa) * (low - 2.0 * delta) / ((1.0 + delta) * l)
        }
    };
    if !(nu > 0.0 && nu < 1.0) {
        return bad(format!("predicted rate {nu} outside (0, 1)"));
    }
    Ok(RatePrediction {
        nu,
        model,
        kappa,
        norm_truth,
    })
}

/// Upper bound `6‖x̄‖² + 6ρ² + 1` on the kernel Hessian norm over `B(x̄, ρ)`.
pub fn theta_bound(norm_truth: f64, rho: f64) -> f64 {
    6.0 * norm_truth * norm_truth + 6.0 * rho * rho + 1.0
}

/// Least-squares fit of `ln(e_k²)` against `k` over a trailing segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// First and last iteration index of the segment.
    pub start: usize,
    pub end: usize,
    pub slope: f64,
    /// `exp(slope)`: fitted per-iteration factor of `e_k²`.
    pub factor: f64,
    pub r_squared: f64,
}

/// Minimum number of points in a fitted segment.
pub const MIN_SEGMENT: usize = 3;

/// Fits the largest suffix of `errors` whose `ln(e_k²)` is linear in `k` with
/// `R² ≥ r2_min`. Errors are used up to the first non-positive or non-finite
/// entry. Returns `None` when no such segment exists (for instance a constant
/// trace, whose `R²` is undefined).
pub fn fit_linear_tail(errors: &[f64], r2_min: f64) -> Option<RateFit> {
    let usable = errors
        .iter()
        .position(|e| !(e.is_finite() && *e > 0.0))
        .unwrap_or(errors.len());
    let ys: Vec<f64> = errors[..usable].iter().map(|e| (e * e).ln()).collect();
    if ys.len() < MIN_SEGMENT {
        return None;
    }
    let end = ys.len() - 1;
    let (mut sx, mut sy, mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut best = None;
    for start in (0..=end).rev() {
        let (x, y) = (start as f64, ys[start]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        let count = (end - start + 1) as f64;
        if end - start + 1 < MIN_SEGMENT {
            continue;
        }
        let vxx = sxx - sx * sx / count;
        let vyy = syy - sy * sy / count;
        let vxy = sxy - sx * sy / count;
        if vyy <= 1e-14 * (syy.abs() + 1.0) {
            continue;
        }
        let r2 = vxy * vxy / (vxx * vyy);
        if r2 >= r2_min {
            let slope = vxy / vxx;
            best = Some(RateFit {
                start,
                end,
                slope,
                factor: slope.exp(),
                r_squared: r2,
            });
        }
    }
    best
}
