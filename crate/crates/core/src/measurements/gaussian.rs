use rand::Rng as _;
use rand_distr::StandardNormal;

use super::{MeasurementOperator, MeasurementVector, ModelDescriptor};
use crate::error::{check_len, Error, Result};
use crate::rng::rng_from_seed;
use crate::signal::{dot, norm_sq, RealSignal};

/// Dense real sensing matrix with i.i.d. `N(0, 1)` entries, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianModel {
    rows: Vec<f64>,
    n: usize,
    m: usize,
    seed: Option<u64>,
}

/// Draws an `m × n` standard normal matrix from `seed`.
pub fn make_gaussian(n: usize, m: usize, seed: u64) -> Result<GaussianModel> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidSize(format!(
            "gaussian model needs n >= 1 and m >= 1, got n = {n}, m = {m}"
        )));
    }
    let len = n
        .checked_mul(m)
        .ok_or_else(|| Error::InvalidSize("m * n overflows".into()))?;
    let mut rng = rng_from_seed(seed);
    let rows = (0..len).map(|_| rng.sample(StandardNormal)).collect();
    Ok(GaussianModel {
        rows,
        n,
        m,
        seed: Some(seed),
    })
}

impl GaussianModel {
    /// Builds a model from explicit row-major entries (no seed).
    pub fn from_rows(n: usize, m: usize, rows: Vec<f64>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidSize("n and m must be positive".into()));
        }
        check_len(n * m, rows.len())?;
        if rows.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sensing matrix"));
        }
        Ok(Self {
            rows,
            n,
            m,
            seed: None,
        })
    }

    /// Row `r` as a slice of length n.
    pub fn row(&self, r: usize) -> &[f64] {
        &self.rows[r * self.n..(r + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.rows
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor::Gaussian {
            n: self.n,
            m: self.m,
            seed: self.seed.unwrap_or_default(),
        }
    }
}

impl MeasurementOperator for GaussianModel {
    fn signal_len(&self) -> usize {
        self.n
    }

    fn measurement_count(&self) -> usize {
        self.m
    }

    fn apply(&self, x: &[f64]) -> Result<MeasurementVector> {
        check_len(self.n, x.len())?;
        Ok(MeasurementVector::Real(
            self.rows
                .chunks_exact(self.n)
                .map(|row| dot(row, x))
                .collect(),
        ))
    }

    fn adjoint_real(&self, w: &MeasurementVector) -> Result<RealSignal> {
        check_len(self.m, w.len())?;
        let mut out = vec![0.0; self.n];
        match w {
            MeasurementVector::Real(w) => {
                for (row, &wr) in self.rows.chunks_exact(self.n).zip(w) {
                    for (o, a) in out.iter_mut().zip(row) {
                        *o += wr * a;
                    }
                }
            }
            // real rows: Re(a_r w_r) = a_r Re(w_r)
            MeasurementVector::Complex(w) => {
                for (row, wr) in self.rows.chunks_exact(self.n).zip(w) {
                    for (o, a) in out.iter_mut().zip(row) {
                        *o += wr.re * a;
                    }
                }
            }
        }
        Ok(RealSignal::from_vec_unchecked(out))
    }

    fn row_norms_sq(&self) -> Vec<f64> {
        self.rows.chunks_exact(self.n).map(norm_sq).collect()
    }
}
