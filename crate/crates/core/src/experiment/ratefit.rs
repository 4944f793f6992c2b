use std::path::Path;

use serde::Serialize;

use super::io::read_trace_rel_errs;
use crate::error::Result;
use crate::solvers::{fit_linear_tail, RateFit, RatePrediction};

/// Minimum `R²` of the fitted tail.
pub const RATE_FIT_R2: f64 = 0.99;

/// Fitted decay of `rel_err²` against a predicted rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFitReport {
    pub points: usize,
    pub fit: Option<RateFit>,
    pub prediction: Option<RatePrediction>,
    /// `1 − ν`
    pub predicted_factor: Option<f64>,
    /// Fraction of `ln(1 − ν)` the fit may give up.
    pub log_margin: f64,
    /// `ln(fit) ≤ (1 − log_margin)·ln(1 − ν)`; absent without fit or prediction.
    pub within_bound: Option<bool>,
    pub message: String,
}

/// Compares the fitted tail of `errors` with `prediction`. A trace without a
/// linear segment yields a report with `fit = None` rather than an error.
pub fn rate_fit_report(
    errors: &[f64],
    prediction: Option<RatePrediction>,
    log_margin: f64,
) -> RateFitReport {
    let fit = fit_linear_tail(errors, RATE_FIT_R2);
    let predicted_factor = prediction.map(|p| p.factor());
    let within_bound = match (fit, predicted_factor) {
        (Some(f), Some(q)) if q > 0.0 => Some(f.factor.ln() <= (1.0 - log_margin) * q.ln()),
        (Some(_), Some(_)) => Some(false),
        _ => None,
    };
    let message = match (&fit, within_bound) {
        (None, _) => "no linear segment".to_string(),
        (Some(f), None) => format!(
            "fitted factor {:.6} over iterations {}..={}",
            f.factor, f.start, f.end
        ),
        (Some(f), Some(ok)) => format!(
            "fitted factor {:.6} over iterations {}..={} vs predicted {:.6}: {}",
            f.factor,
            f.start,
            f.end,
            predicted_factor.unwrap_or(f64::NAN),
            if ok { "within bound" } else { "exceeds bound" }
        ),
    };
    RateFitReport {
        points: errors.len(),
        fit,
        prediction,
        predicted_factor,
        log_margin,
        within_bound,
        message,
    }
}

/// [`rate_fit_report`] on the `rel_err` column of a trace CSV.
pub fn cmd_rate_fit(
    trace: &Path,
    prediction: Option<RatePrediction>,
    log_margin: f64,
) -> Result<RateFitReport> {
    let errors = read_trace_rel_errs(trace)?;
    Ok(rate_fit_report(&errors, prediction, log_margin))
}
