//! The quartic least-squares objective `f(x) = (1/4m) Σ_r (y[r] − |(Ax)[r]|²)²`,
//! its derivatives, relative smoothness constant and recovery metrics.
//!
//! Everything is matrix-free through [`MeasurementOperator`], so the Gaussian
//! and CDP models share one implementation. With `B_r = Re(a_r a_r*)`:
//!
//! ```text
//! ∇f(x)    = (1/m) Σ_r (|a_r* x|² − y[r]) B_r x
//! ∇²f(x) v = (1/m) Σ_r [(|a_r* x|² − y[r]) B_r v + 2 (xᵀ B_r v) B_r x]
//! ```
//!
//! For real rows `B_r` has rank one and the Hessian reduces to
//! `(1/m) Σ_r (3|a_rᵀx|² − y[r]) a_r a_rᵀ v`.

use crate::error::{check_len, Error, Result};
use crate::measurements::{
    IntensityData, MeasurementModel, MeasurementOperator, MeasurementVector,
};
use crate::signal::{distance, dot, norm, sub, RealSignal};

/// Relative tolerance of the noiseless contract `intensities(truth) = y`.
const NOISELESS_TOL: f64 = 1e-10;

/// Measurement model, intensities and (optionally) the ground truth.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    model: MeasurementModel,
    y: IntensityData,
    truth: Option<RealSignal>,
}

/// `f`, `∇f` and the intermediate `A x` at one point.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: f64,
    pub gradient: RealSignal,
    pub measured: MeasurementVector,
}

impl ProblemInstance {
    /// Bundles a model with data. When `truth` is given it must reproduce `y`.
    pub fn new(
        model: MeasurementModel,
        y: IntensityData,
        truth: Option<RealSignal>,
    ) -> Result<Self> {
        check_len(model.measurement_count(), y.len())?;
        if let Some(t) = &truth {
            check_len(model.signal_len(), t.len())?;
            let expected = model.intensities(t)?;
            let scale = y.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            let worst = expected
                .iter()
                .zip(y.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if worst > NOISELESS_TOL * scale {
                return Err(Error::InvalidParameter(format!(
                    "truth does not reproduce the intensities (max deviation {worst:e})"
                )));
            }
        }
        Ok(Self { model, y, truth })
    }

    /// Simulates noiseless intensities of `truth` and keeps it for metrics.
    pub fn from_truth(model: impl Into<MeasurementModel>, truth: RealSignal) -> Result<Self> {
        let model = model.into();
        check_len(model.signal_len(), truth.len())?;
        let y = model.intensities(&truth)?;
        Ok(Self {
            model,
            y,
            truth: Some(truth),
        })
    }

    pub fn model(&self) -> &MeasurementModel {
        &self.model
    }

    pub fn intensities(&self) -> &IntensityData {
        &self.y
    }

    pub fn truth(&self) -> Option<&RealSignal> {
        self.truth.as_ref()
    }

    /// Drops the ground truth (solvers then cannot use the error stop).
    pub fn without_truth(mut self) -> Self {
        self.truth = None;
        self
    }

    pub fn n(&self) -> usize {
        self.model.signal_len()
    }

    pub fn m(&self) -> usize {
        self.model.measurement_count()
    }

    fn residual(&self, measured: &MeasurementVector) -> Vec<f64> {
        measured
            .modulus_sq()
            .iter()
            .zip(self.y.iter())
            .map(|(a, y)| a - y)
            .collect()
    }

    /// `f(x) = (1/4m) Σ_r (y[r] − |(Ax)[r]|²)²`
    pub fn f_value(&self, x: &[f64]) -> Result<f64> {
        let measured = self.model.apply(x)?;
        Ok(self.value_from(&measured))
    }

    pub(crate) fn value_from(&self, measured: &MeasurementVector) -> f64 {
        let r = self.residual(measured);
        dot(&r, &r) / (4.0 * self.m() as f64)
    }

    /// `∇f(x) = (1/m) Re(A* ((|Ax|² − y) ∘ Ax))`
    pub fn f_gradient(&self, x: &[f64]) -> Result<RealSignal> {
        Ok(self.evaluate(x)?.gradient)
    }

    /// Value and gradient sharing one application of `A`.
    pub fn evaluate(&self, x: &[f64]) -> Result<Evaluation> {
        let measured = self.model.apply(x)?;
        let r = self.residual(&measured);
        let value = dot(&r, &r) / (4.0 * self.m() as f64);
        let mut gradient = self.model.adjoint_real(&measured.scaled(&r))?.into_vec();
        let inv_m = 1.0 / self.m() as f64;
        gradient.iter_mut().for_each(|g| *g *= inv_m);
        Ok(Evaluation {
            value,
            gradient: RealSignal::from_vec_unchecked(gradient),
            measured,
        })
    }

    /// `∇²f(x) v`
    pub fn hessian_vecprod(&self, x: &[f64], v: &[f64]) -> Result<RealSignal> {
        check_len(self.n(), v.len())?;
        let ax = self.model.apply(x)?;
        let av = self.model.apply(v)?;
        let r = self.residual(&ax);
        let cross: Vec<f64> = ax.re_conj_product(&av).iter().map(|c| 2.0 * c).collect();
        let w = av.scaled(&r).add(&ax.scaled(&cross));
        let mut out = self.model.adjoint_real(&w)?.into_vec();
        let inv_m = 1.0 / self.m() as f64;
        out.iter_mut().for_each(|h| *h *= inv_m);
        Ok(RealSignal::from_vec_unchecked(out))
    }

    /// Global relative smoothness constant `L = (3/m) Σ_r ‖a_r‖⁴`.
    pub fn relative_smoothness_bound(&self) -> SmoothnessInfo {
        let sum: f64 = self.model.row_norms_sq().iter().map(|s| s * s).sum();
        SmoothnessInfo {
            l_global: 3.0 * sum / self.m() as f64,
        }
    }

    /// `D_f(x, u) = f(x) − f(u) − ⟨∇f(u), x − u⟩` (may be negative).
    pub fn bregman_f(&self, x: &[f64], u: &[f64]) -> Result<f64> {
        check_len(self.n(), x.len())?;
        check_len(self.n(), u.len())?;
        let at_u = self.evaluate(u)?;
        let fx = self.f_value(x)?;
        Ok(fx - at_u.value - dot(&at_u.gradient, &sub(x, u)))
    }
}

/// Global relative smoothness information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessInfo {
    pub l_global: f64,
}

impl SmoothnessInfo {
    /// Constant step `(1 − κ)/L`.
    pub fn gamma_for(&self, kappa: f64) -> f64 {
        (1.0 - kappa) / self.l_global
    }
}

/// `min(‖x − x̄‖, ‖x + x̄‖)`
pub fn dist_to_truth(x: &[f64], truth: &[f64]) -> Result<f64> {
    check_len(truth.len(), x.len())?;
    let minus = distance(x, truth);
    let plus = x
        .iter()
        .zip(truth)
        .map(|(a, b)| (a + b) * (a + b))
        .sum::<f64>()
        .sqrt();
    Ok(minus.min(plus))
}

/// `dist(x, {±x̄}) / ‖x̄‖`
pub fn relative_error(x: &[f64], truth: &[f64]) -> Result<f64> {
    let t = norm(truth);
    if t == 0.0 {
        return Err(Error::InvalidParameter("truth has zero norm".into()));
    }
    Ok(dist_to_truth(x, truth)? / t)
}

/// Largest dimension accepted by [`expected_hessian_gaussian`].
pub const DENSE_HESSIAN_MAX_N: usize = 64;

/// Expected Hessian of `f` under i.i.d. `N(0, 1)` rows, as a dense row-major
/// `n × n` matrix: `3(2xxᵀ + ‖x‖²I) − 2x̄x̄ᵀ − ‖x̄‖²I`.
pub fn expected_hessian_gaussian(x: &[f64], truth: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    check_len(n, truth.len())?;
    if n > DENSE_HESSIAN_MAX_N {
        return Err(Error::InvalidSize(format!(
            "dense expected Hessian limited to n <= {DENSE_HESSIAN_MAX_N}, got {n}"
        )));
    }
    let diag = 3.0 * dot(x, x) - dot(truth, truth);
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = 6.0 * x[i] * x[j] - 2.0 * truth[i] * truth[j];
        }
        out[i * n + i] += diag;
    }
    Ok(out)
}
