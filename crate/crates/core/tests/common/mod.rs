//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use mirror_pr::measurements::make_gaussian;
use mirror_pr::measurements::{CdpModel, MeasurementModel, MeasurementOperator, MeasurementVector};
use mirror_pr::objective::expected_hessian_gaussian;
use mirror_pr::objective::ProblemInstance;
use mirror_pr::rng::rng_from_seed;
use mirror_pr::RealSignal;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian_vec(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn complex_vec(m: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = rng_from_seed(seed);
    (0..m)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    d / norm(b).max(f64::MIN_POSITIVE)
}

/// `e^{−2πi k/n}` with the exponent reduced mod `n` first.
fn twiddle(k: usize, n: usize) -> Complex64 {
    let angle = -2.0 * PI * (k % n) as f64 / n as f64;
    Complex64::new(angle.cos(), angle.sin())
}

/// Dense unnormalized DFT matrix, `F[j][l] = e^{−2πi jl/n}`.
pub fn dft_matrix(n: usize) -> Vec<Vec<Complex64>> {
    (0..n)
        .map(|j| (0..n).map(|l| twiddle(j * l, n)).collect())
        .collect()
}

/// Dense 2D DFT on a row-major `h × w` grid: `F[(k1,k2)][(i,j)] =
/// e^{−2πi (k1 i/h + k2 j/w)}`.
pub fn dft_matrix_2d(h: usize, w: usize) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(h * w);
    for k1 in 0..h {
        for k2 in 0..w {
            let mut row = Vec::with_capacity(h * w);
            for i in 0..h {
                for j in 0..w {
                    row.push(twiddle(k1 * i, h) * twiddle(k2 * j, w));
                }
            }
            out.push(row);
        }
    }
    out
}

/// Rows `a_r*` of a CDP model, ordered `r = p·n + j`.
pub fn cdp_dense_rows(model: &CdpModel) -> Vec<Vec<Complex64>> {
    let n = model.signal_len();
    let f = match model.grid_shape() {
        Some((h, w)) => dft_matrix_2d(h, w),
        None => dft_matrix(n),
    };
    let mut rows = Vec::with_capacity(model.measurement_count());
    for p in 0..model.mask_count() {
        let d = model.mask(p);
        for fj in &f {
            rows.push(fj.iter().zip(d).map(|(a, b)| a * b).collect());
        }
    }
    rows
}

/// Dense rows of either model (complex for uniformity).
pub fn dense_rows(model: &MeasurementModel) -> Vec<Vec<Complex64>> {
    match model {
        MeasurementModel::Gaussian(g) => (0..g.measurement_count())
            .map(|r| g.row(r).iter().map(|&v| Complex64::new(v, 0.0)).collect())
            .collect(),
        MeasurementModel::Cdp(c) => cdp_dense_rows(c),
    }
}

pub fn dense_apply(rows: &[Vec<Complex64>], x: &[f64]) -> Vec<Complex64> {
    rows.iter()
        .map(|r| r.iter().zip(x).map(|(a, &b)| a * b).sum())
        .collect()
}

/// `Re(A* w) = Re(Σ_r conj(row_r) w_r)`
pub fn dense_adjoint_real(rows: &[Vec<Complex64>], w: &[Complex64]) -> Vec<f64> {
    let n = rows[0].len();
    let mut out = vec![0.0; n];
    for (r, wr) in rows.iter().zip(w) {
        for (o, a) in out.iter_mut().zip(r) {
            *o += (a.conj() * wr).re;
        }
    }
    out
}

pub fn as_complex(v: &MeasurementVector) -> Vec<Complex64> {
    v.to_complex()
}

/// Root of `c t³ + t − 1` on `[0, 1]` by plain bisection.
pub fn cubic_bisection(c: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if c * mid * mid * mid + mid - 1.0 > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Central-difference gradient with step `h = 1e-5 (1 + ‖x‖)`.
pub fn fd_gradient(p: &ProblemInstance, x: &[f64]) -> Vec<f64> {
    let h = 1e-5 * (1.0 + norm(x));
    (0..x.len())
        .map(|i| {
            let (mut up, mut dn) = (x.to_vec(), x.to_vec());
            up[i] += h;
            dn[i] -= h;
            (p.f_value(&up).unwrap() - p.f_value(&dn).unwrap()) / (2.0 * h)
        })
        .collect()
}

/// Central difference of the gradient along `v`.
pub fn fd_hessian_vec(p: &ProblemInstance, x: &[f64], v: &[f64]) -> Vec<f64> {
    let h = 1e-5 * (1.0 + norm(x)) / norm(v).max(1e-300);
    let up: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + h * b).collect();
    let dn: Vec<f64> = x.iter().zip(v).map(|(a, b)| a - h * b).collect();
    let gu = p.f_gradient(&up).unwrap();
    let gd = p.f_gradient(&dn).unwrap();
    gu.iter()
        .zip(gd.iter())
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect()
}

/// Dense `Y = (1/m) Σ_r y_r Re(a_r a_r*)`, row-major.
pub fn dense_spectral_matrix(p: &ProblemInstance) -> Vec<f64> {
    let rows = dense_rows(p.model());
    let n = p.n();
    let mut y = vec![0.0; n * n];
    for (row, &yr) in rows.iter().zip(p.intensities().iter()) {
        for i in 0..n {
            for j in 0..n {
                y[i * n + j] += yr * (row[i].conj() * row[j]).re;
            }
        }
    }
    let m = p.m() as f64;
    y.iter_mut().for_each(|v| *v /= m);
    y
}

/// Dense Hessian of `f` at `x` for a real Gaussian model,
/// `(1/m) Σ_r (3 (a_rᵀx)² − y_r) a_r a_rᵀ`, row-major.
pub fn dense_gaussian_hessian(p: &ProblemInstance, x: &[f64]) -> Vec<f64> {
    let MeasurementModel::Gaussian(g) = p.model() else {
        panic!("gaussian model expected")
    };
    let n = p.n();
    let mut h = vec![0.0; n * n];
    for (r, &yr) in p.intensities().iter().enumerate() {
        let a = g.row(r);
        let ax: f64 = a.iter().zip(x).map(|(u, v)| u * v).sum();
        let c = 3.0 * ax * ax - yr;
        for i in 0..n {
            for j in 0..n {
                h[i * n + j] += c * a[i] * a[j];
            }
        }
    }
    let m = p.m() as f64;
    h.iter_mut().for_each(|v| *v /= m);
    h
}

pub fn matvec(a: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..a.len() / n)
        .map(|i| {
            a[i * n..(i + 1) * n]
                .iter()
                .zip(x)
                .map(|(u, v)| u * v)
                .sum()
        })
        .collect()
}

pub fn spectral_norm(a: &[f64], n: usize) -> f64 {
    DMatrix::from_row_slice(n, n, a)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Mean of dense Hessians over `fresh` independent models with `m = 512 n`
/// rows each, compared with the closed-form expectation.
pub fn hessian_mean_deviation(x: &[f64], truth: &RealSignal, fresh: u64, seed: u64) -> f64 {
    let n = x.len();
    let m = 512 * n;
    let mut mean = vec![0.0; n * n];
    for k in 0..fresh {
        let model = make_gaussian(n, m, seed + k).unwrap();
        let p = ProblemInstance::from_truth(model, truth.clone()).unwrap();
        let h = dense_gaussian_hessian(&p, x);
        mean.iter_mut()
            .zip(&h)
            .for_each(|(a, b)| *a += b / fresh as f64);
    }
    let expected = expected_hessian_gaussian(x, truth).unwrap();
    let dev: Vec<f64> = mean.iter().zip(&expected).map(|(a, b)| a - b).collect();
    spectral_norm(&dev, n)
}
