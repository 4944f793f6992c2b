//! Initial points: spectral initialization and uniform random draws.

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::measurements::{MeasurementOperator, MeasurementVector};
use crate::objective::ProblemInstance;
use crate::rng::rng_from_seed;
use crate::signal::{norm, RealSignal};

/// Power-iteration settings for [`spectral_init`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectralConfig {
    pub power_iters_max: usize,
    /// Stop when `min(‖v_{k+1} − v_k‖, ‖v_{k+1} + v_k‖) ≤ power_tol`.
    pub power_tol: f64,
    /// Seed of the random start vector.
    pub seed: u64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            power_iters_max: 200,
            power_tol: 1e-8,
            seed: 0,
        }
    }
}

impl SpectralConfig {
    pub fn validate(&self) -> Result<()> {
        if self.power_iters_max == 0 {
            return Err(Error::InvalidParameter(
                "power_iters_max must be >= 1".into(),
            ));
        }
        if !(self.power_tol > 0.0 && self.power_tol.is_finite()) {
            return Err(Error::InvalidParameter("power_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Result of [`spectral_init`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralInit {
    /// `λ v / ‖v‖`.
    pub x0: RealSignal,
    /// `λ = sqrt(n Σ y[r] / Σ ‖a_r‖²)`.
    pub lambda: f64,
    /// Rayleigh quotient of the final iterate.
    pub eigenvalue: f64,
    pub iterations: usize,
    /// False when the rotation test did not pass within `power_iters_max`;
    /// `x0` is then the last iterate.
    pub converged: bool,
}

/// `v ↦ Y v = (1/m) Re(A* (y ∘ A v))`
pub fn spectral_operator(problem: &ProblemInstance, v: &[f64]) -> Result<RealSignal> {
    check_len(problem.n(), v.len())?;
    let model = problem.model();
    let av: MeasurementVector = model.apply(v)?;
    let mut out = model
        .adjoint_real(&av.scaled(problem.intensities()))?
        .into_vec();
    let inv_m = 1.0 / problem.m() as f64;
    out.iter_mut().for_each(|o| *o *= inv_m);
    Ok(RealSignal::from_vec_unchecked(out))
}

/// Spectral initialization: the dominant eigenvector of `Y` (power iteration
/// from a seeded Gaussian start) rescaled to norm `λ`.
pub fn spectral_init(problem: &ProblemInstance, cfg: &SpectralConfig) -> Result<SpectralInit> {
    cfg.validate()?;
    let n = problem.n();
    let row_energy: f64 = problem.model().row_norms_sq().iter().sum();
    let total: f64 = problem.intensities().iter().sum();
    let lambda = (n as f64 * total / row_energy).sqrt();

    let mut rng = rng_from_seed(cfg.seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    normalize(&mut v);

    let mut eigenvalue = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.power_iters_max {
        iterations += 1;
        let mut w = spectral_operator(problem, &v)?.into_vec();
        eigenvalue = crate::signal::dot(&v, &w);
        if !normalize(&mut w) {
            // Y v = 0: v already spans whatever is left
            converged = true;
            break;
        }
        let (minus, plus) = v.iter().zip(&w).fold((0.0, 0.0), |(a, b), (p, q)| {
            (a + (q - p) * (q - p), b + (q + p) * (q + p))
        });
        v = w;
        if minus.min(plus).sqrt() <= cfg.power_tol {
            converged = true;
            break;
        }
    }
    let x0 = v.into_iter().map(|c| lambda * c).collect();
    Ok(SpectralInit {
        x0: RealSignal::new(x0)?,
        lambda,
        eigenvalue,
        iterations,
        converged,
    })
}

fn normalize(v: &mut [f64]) -> bool {
    let s = norm(v);
    if s == 0.0 || !s.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|c| *c /= s);
    true
}

/// Entries i.i.d. uniform on `[−scale, scale]`.
pub fn random_init(n: usize, scale: f64, seed: u64) -> RealSignal {
    let scale = scale.abs();
    let mut rng = rng_from_seed(seed);
    RealSignal::from_vec_unchecked(
        (0..n)
            .map(|_| (2.0 * rng.random::<f64>() - 1.0) * scale)
            .collect(),
    )
}

/// Radius function `η₁(ρ) = sqrt(2 − 2 sqrt(1 − ρ)) + ρ/2` of the spectral
/// neighbourhood guarantee, defined for `ρ ∈ (0, 1)`.
pub fn eta1(rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eta1 needs rho in (0, 1), got {rho}"
        )));
    }
    Ok((2.0 - 2.0 * (1.0 - rho).sqrt()).sqrt() + 0.5 * rho)
}
