use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng as _;
use rustfft::{Fft, FftPlanner};

use super::{MeasurementOperator, MeasurementVector, ModelDescriptor};
use crate::error::{check_len, Error, Result};
use crate::rng::rng_from_seed;
use crate::signal::RealSignal;

/// Coded diffraction patterns: `P` ternary masks `d_p ∈ {−1, 0, 1}ⁿ` drawn
/// with probabilities `{¼, ½, ¼}`, each followed by the unnormalized DFT
/// with kernel `e^{−2πi jℓ/n}` (2D DFT for signals on an `h × w` grid).
///
/// Measurement `r = p·n + j` is frequency `j` (row-major for 2D) of mask `p`;
/// `m = n·P`. The operator is applied matrix-free through FFTs.
#[derive(Clone)]
pub struct CdpModel {
    masks: Vec<f64>,
    n: usize,
    count: usize,
    seed: Option<u64>,
    grid_shape: Option<(usize, usize)>,
    plans: Plans,
}

#[derive(Clone)]
enum Plans {
    Line {
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
    },
    Grid {
        height: usize,
        width: usize,
        row_forward: Arc<dyn Fft<f64>>,
        row_inverse: Arc<dyn Fft<f64>>,
        col_forward: Arc<dyn Fft<f64>>,
        col_inverse: Arc<dyn Fft<f64>>,
    },
}

impl fmt::Debug for CdpModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CdpModel")
            .field("n", &self.n)
            .field("masks", &self.count)
            .field("seed", &self.seed)
            .field("grid_shape", &self.grid_shape)
            .finish_non_exhaustive()
    }
}

impl PartialEq for CdpModel {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.count == other.count
            && self.grid_shape == other.grid_shape
            && self.masks == other.masks
    }
}

/// Draws `masks` ternary patterns of length `n` from `seed`.
///
/// With `grid_shape = Some((h, w))` the signal is an `h × w` row-major grid
/// and the 2D DFT is used; `h · w` must equal `n`.
pub fn make_cdp(
    n: usize,
    masks: usize,
    seed: u64,
    grid_shape: Option<(usize, usize)>,
) -> Result<CdpModel> {
    if n == 0 || masks == 0 {
        return Err(Error::InvalidSize(format!(
            "cdp model needs n >= 1 and P >= 1, got n = {n}, P = {masks}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let values = (0..n * masks)
        .map(|_| match rng.random_range(0..4u8) {
            0 => -1.0,
            1 => 1.0,
            _ => 0.0,
        })
        .collect();
    CdpModel::build(n, masks, values, Some(seed), grid_shape)
}

impl CdpModel {
    /// Builds a model from explicit masks (row `p` of the `P × n` array is `d_p`).
    /// Entries need not be ternary.
    pub fn from_masks(
        n: usize,
        masks: Vec<f64>,
        grid_shape: Option<(usize, usize)>,
    ) -> Result<Self> {
        if n == 0 || masks.is_empty() || masks.len() % n != 0 {
            return Err(Error::InvalidSize(
                "mask bank length must be a positive multiple of n".into(),
            ));
        }
        if masks.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("mask bank"));
        }
        let count = masks.len() / n;
        Self::build(n, count, masks, None, grid_shape)
    }

    fn build(
        n: usize,
        count: usize,
        masks: Vec<f64>,
        seed: Option<u64>,
        grid_shape: Option<(usize, usize)>,
    ) -> Result<Self> {
        let mut planner = FftPlanner::new();
        let plans = match grid_shape {
            None => Plans::Line {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            },
            Some((h, w)) => {
                if h == 0 || w == 0 || h.checked_mul(w) != Some(n) {
                    return Err(Error::InvalidSize(format!(
                        "grid shape {h} x {w} does not match n = {n}"
                    )));
                }
                Plans::Grid {
                    height: h,
                    width: w,
                    row_forward: planner.plan_fft_forward(w),
                    row_inverse: planner.plan_fft_inverse(w),
                    col_forward: planner.plan_fft_forward(h),
                    col_inverse: planner.plan_fft_inverse(h),
                }
            }
        };
        Ok(Self {
            masks,
            n,
            count,
            seed,
            grid_shape,
            plans,
        })
    }

    /// Number of masks `P`.
    pub fn mask_count(&self) -> usize {
        self.count
    }

    /// Mask `d_p`.
    pub fn mask(&self, p: usize) -> &[f64] {
        &self.masks[p * self.n..(p + 1) * self.n]
    }

    /// All masks, row-major `P × n`.
    pub fn masks(&self) -> &[f64] {
        &self.masks
    }

    pub fn grid_shape(&self) -> Option<(usize, usize)> {
        self.grid_shape
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor::Cdp {
            n: self.n,
            masks: self.count,
            seed: self.seed.unwrap_or_default(),
            grid_shape: self.grid_shape,
        }
    }

    /// Unnormalized forward (`e^{−2πi·}`) or inverse (`e^{+2πi·}`) DFT of one
    /// block, in place.
    fn transform(&self, block: &mut [Complex64], inverse: bool, scratch: &mut Vec<Complex64>) {
        match &self.plans {
            Plans::Line {
                forward,
                inverse: inv,
            } => {
                let plan = if inverse { inv } else { forward };
                scratch.resize(plan.get_inplace_scratch_len(), Complex64::default());
                plan.process_with_scratch(block, scratch);
            }
            Plans::Grid {
                height,
                width,
                row_forward,
                row_inverse,
                col_forward,
                col_inverse,
            } => {
                let (h, w) = (*height, *width);
                let (rows, cols) = if inverse {
                    (row_inverse, col_inverse)
                } else {
                    (row_forward, col_forward)
                };
                // rows are contiguous; rustfft processes consecutive chunks of length w
                scratch.resize(rows.get_inplace_scratch_len(), Complex64::default());
                rows.process_with_scratch(block, scratch);
                let mut transposed = vec![Complex64::default(); h * w];
                transpose(block, &mut transposed, h, w);
                scratch.resize(cols.get_inplace_scratch_len(), Complex64::default());
                cols.process_with_scratch(&mut transposed, scratch);
                transpose(&transposed, block, w, h);
            }
        }
    }
}

/// `dst = srcᵀ` for a row-major `rows × cols` source.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

impl MeasurementOperator for CdpModel {
    fn signal_len(&self) -> usize {
        self.n
    }

    fn measurement_count(&self) -> usize {
        self.n * self.count
    }

    fn apply(&self, x: &[f64]) -> Result<MeasurementVector> {
        check_len(self.n, x.len())?;
        let mut out = vec![Complex64::default(); self.n * self.count];
        let mut scratch = Vec::new();
        for (p, block) in out.chunks_exact_mut(self.n).enumerate() {
            for ((b, d), xv) in block.iter_mut().zip(self.mask(p)).zip(x) {
                *b = Complex64::new(d * xv, 0.0);
            }
            self.transform(block, false, &mut scratch);
        }
        Ok(MeasurementVector::Complex(out))
    }

    fn adjoint_real(&self, w: &MeasurementVector) -> Result<RealSignal> {
        check_len(self.n * self.count, w.len())?;
        let w = match w {
            MeasurementVector::Complex(v) => std::borrow::Cow::Borrowed(v),
            real => std::borrow::Cow::Owned(real.to_complex()),
        };
        let mut out = vec![0.0; self.n];
        let mut block = vec![Complex64::default(); self.n];
        let mut scratch = Vec::new();
        for (p, wp) in w.chunks_exact(self.n).enumerate() {
            block.copy_from_slice(wp);
            // F* = unnormalized inverse DFT
            self.transform(&mut block, true, &mut scratch);
            for ((o, d), b) in out.iter_mut().zip(self.mask(p)).zip(&block) {
                *o += d * b.re;
            }
        }
        Ok(RealSignal::from_vec_unchecked(out))
    }

    fn row_norms_sq(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * self.count);
        for p in 0..self.count {
            let energy: f64 = self.mask(p).iter().map(|d| d * d).sum();
            out.extend(std::iter::repeat_n(energy, self.n));
        }
        out
    }
}
