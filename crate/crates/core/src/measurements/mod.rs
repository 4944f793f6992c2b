//! Measurement models: dense real Gaussian sensing matrices and coded
//! diffraction patterns (ternary masks followed by an unnormalized DFT).
//!
//! Both models expose the same operator surface: `A x`, `Re(A* w)`, the
//! intensities `|A x|²` and the squared row norms `‖a_r‖²`.

mod cdp;
mod gaussian;

pub use cdp::{make_cdp, CdpModel};
pub use gaussian::{make_gaussian, GaussianModel};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::signal::RealSignal;

/// Output of `A x`: real for Gaussian models, complex for CDP.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasurementVector {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl MeasurementVector {
    pub fn len(&self) -> usize {
        match self {
            Self::Real(v) => v.len(),
            Self::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `|w[r]|²` for every entry.
    pub fn modulus_sq(&self) -> Vec<f64> {
        match self {
            Self::Real(v) => v.iter().map(|a| a * a).collect(),
            Self::Complex(v) => v.iter().map(|a| a.norm_sqr()).collect(),
        }
    }

    /// Entry-wise product with real weights.
    pub fn scaled(&self, weights: &[f64]) -> Self {
        debug_assert_eq!(weights.len(), self.len());
        match self {
            Self::Real(v) => Self::Real(v.iter().zip(weights).map(|(a, w)| a * w).collect()),
            Self::Complex(v) => Self::Complex(v.iter().zip(weights).map(|(a, w)| a * *w).collect()),
        }
    }

    /// `Re(conj(self[r]) · other[r])` for every entry.
    pub fn re_conj_product(&self, other: &Self) -> Vec<f64> {
        match (self, other) {
            (Self::Real(a), Self::Real(b)) => a.iter().zip(b).map(|(x, y)| x * y).collect(),
            (Self::Complex(a), Self::Complex(b)) => {
                a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).collect()
            }
            (a, b) => {
                let (a, b) = (a.to_complex(), b.to_complex());
                a.iter().zip(&b).map(|(x, y)| (x.conj() * y).re).collect()
            }
        }
    }

    /// `Re⟨self, other⟩ = Σ_r Re(conj(self[r]) · other[r])`.
    pub fn re_inner(&self, other: &Self) -> f64 {
        self.re_conj_product(other).iter().sum()
    }

    /// Entry-wise sum.
    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (Self::Real(a), Self::Real(b)) => {
                Self::Real(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (a, b) => {
                let (a, b) = (a.to_complex(), b.to_complex());
                Self::Complex(a.iter().zip(&b).map(|(x, y)| x + y).collect())
            }
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            Self::Real(v) => v.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
            Self::Complex(v) => v.clone(),
        }
    }
}

/// Intensity data `y[r] = |(A x̄)[r]|²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntensityData(Vec<f64>);

impl IntensityData {
    /// Wraps measured intensities; entries must be finite and nonnegative.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(crate::Error::InvalidParameter(
                "intensities must be finite and nonnegative".into(),
            ));
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Deref for IntensityData {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// A linear measurement operator `A: ℝⁿ → ℂᵐ` with rows `a_r*`.
pub trait MeasurementOperator {
    /// Signal length n.
    fn signal_len(&self) -> usize;

    /// Number of measurements m.
    fn measurement_count(&self) -> usize;

    /// `A x`.
    fn apply(&self, x: &[f64]) -> Result<MeasurementVector>;

    /// `Re(A* w)`.
    fn adjoint_real(&self, w: &MeasurementVector) -> Result<RealSignal>;

    /// `‖a_r‖²` for every row.
    fn row_norms_sq(&self) -> Vec<f64>;

    /// `y[r] = |(A x)[r]|²`.
    fn intensities(&self, x: &[f64]) -> Result<IntensityData> {
        Ok(IntensityData(self.apply(x)?.modulus_sq()))
    }
}

/// Either supported measurement model.
#[derive(Debug, Clone)]
pub enum MeasurementModel {
    Gaussian(GaussianModel),
    Cdp(CdpModel),
}

impl MeasurementModel {
    pub fn descriptor(&self) -> ModelDescriptor {
        match self {
            Self::Gaussian(g) => g.descriptor(),
            Self::Cdp(c) => c.descriptor(),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Self::Gaussian(_) => ModelKind::Gaussian,
            Self::Cdp(_) => ModelKind::Cdp,
        }
    }
}

impl From<GaussianModel> for MeasurementModel {
    fn from(m: GaussianModel) -> Self {
        Self::Gaussian(m)
    }
}

impl From<CdpModel> for MeasurementModel {
    fn from(m: CdpModel) -> Self {
        Self::Cdp(m)
    }
}

impl MeasurementOperator for MeasurementModel {
    fn signal_len(&self) -> usize {
        match self {
            Self::Gaussian(g) => g.signal_len(),
            Self::Cdp(c) => c.signal_len(),
        }
    }

    fn measurement_count(&self) -> usize {
        match self {
            Self::Gaussian(g) => g.measurement_count(),
            Self::Cdp(c) => c.measurement_count(),
        }
    }

    fn apply(&self, x: &[f64]) -> Result<MeasurementVector> {
        match self {
            Self::Gaussian(g) => g.apply(x),
            Self::Cdp(c) => c.apply(x),
        }
    }

    fn adjoint_real(&self, w: &MeasurementVector) -> Result<RealSignal> {
        match self {
            Self::Gaussian(g) => g.adjoint_real(w),
            Self::Cdp(c) => c.adjoint_real(w),
        }
    }

    fn row_norms_sq(&self) -> Vec<f64> {
        match self {
            Self::Gaussian(g) => g.row_norms_sq(),
            Self::Cdp(c) => c.row_norms_sq(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Gaussian,
    Cdp,
}

/// Replayable description of a seeded model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelDescriptor {
    Gaussian {
        n: usize,
        m: usize,
        seed: u64,
    },
    Cdp {
        n: usize,
        masks: usize,
        seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid_shape: Option<(usize, usize)>,
    },
}

impl ModelDescriptor {
    /// Regenerates the model from its seed.
    pub fn build(&self) -> Result<MeasurementModel> {
        Ok(match *self {
            Self::Gaussian { n, m, seed } => make_gaussian(n, m, seed)?.into(),
            Self::Cdp {
                n,
                masks,
                seed,
                grid_shape,
            } => make_cdp(n, masks, seed, grid_shape)?.into(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
