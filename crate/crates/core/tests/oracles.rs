mod common;

use common::*;
use mirror_pr::bregman::{bregman_entropy, mirror_step, solve_mirror_cubic};
use mirror_pr::initialization::spectral_operator;
use mirror_pr::measurements::{
    make_cdp, make_gaussian, CdpModel, MeasurementModel, MeasurementOperator, MeasurementVector,
};
use mirror_pr::objective::ProblemInstance;
use mirror_pr::RealSignal;
use num_complex::Complex64;

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn cdp_apply_matches_dense_dft_1d() {
    for seed in 0..5 {
        let model = make_cdp(8, 2, seed, None).unwrap();
        let rows = cdp_dense_rows(&model);
        let x = gaussian_vec(8, 100 + seed);
        let fast = as_complex(&model.apply(&x).unwrap());
        let dense = dense_apply(&rows, &x);
        assert!(max_abs_diff(&fast, &dense) <= 1e-10, "seed {seed}");

        let w = complex_vec(16, 200 + seed);
        let fast = model
            .adjoint_real(&MeasurementVector::Complex(w.clone()))
            .unwrap();
        let dense = dense_adjoint_real(&rows, &w);
        assert!(rel_diff(&fast, &dense) <= 1e-10, "seed {seed}");
    }
}

#[test]
fn cdp_apply_matches_dense_dft_2d() {
    for &(h, w) in &[(2, 4), (3, 5), (4, 4)] {
        let model = make_cdp(h * w, 3, 9, Some((h, w))).unwrap();
        let rows = cdp_dense_rows(&model);
        let x = gaussian_vec(h * w, 1);
        let fast = as_complex(&model.apply(&x).unwrap());
        assert!(
            max_abs_diff(&fast, &dense_apply(&rows, &x)) <= 1e-10,
            "{h}x{w}"
        );
        let wv = complex_vec(3 * h * w, 2);
        let fast = model
            .adjoint_real(&MeasurementVector::Complex(wv.clone()))
            .unwrap();
        assert!(
            rel_diff(&fast, &dense_adjoint_real(&rows, &wv)) <= 1e-10,
            "{h}x{w}"
        );
    }
}

#[test]
fn gaussian_matches_dense_transpose() {
    let model: MeasurementModel = make_gaussian(8, 16, 3).unwrap().into();
    let rows = dense_rows(&model);
    let x = gaussian_vec(8, 4);
    let fast = as_complex(&model.apply(&x).unwrap());
    assert!(max_abs_diff(&fast, &dense_apply(&rows, &x)) <= 1e-12);
    let w: Vec<f64> = gaussian_vec(16, 5);
    let wc: Vec<Complex64> = w.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let fast = model.adjoint_real(&MeasurementVector::Real(w)).unwrap();
    assert!(rel_diff(&fast, &dense_adjoint_real(&rows, &wc)) <= 1e-12);
    let norms: Vec<f64> = rows
        .iter()
        .map(|r| r.iter().map(|v| v.norm_sqr()).sum())
        .collect();
    assert!(rel_diff(&model.row_norms_sq(), &norms) <= 1e-14);
}

#[test]
fn delta_has_flat_spectrum() {
    let model = CdpModel::from_masks(4, vec![-1.0, 0.0, 1.0, 1.0], None).unwrap();
    let out = as_complex(&model.apply(&[2.5, 0.0, 0.0, 0.0]).unwrap());
    for v in out {
        assert!((v.norm() - 2.5).abs() < 1e-14);
    }
}

#[test]
fn adjoint_identity_hundred_trials() {
    let models: Vec<MeasurementModel> = vec![
        make_gaussian(16, 40, 1).unwrap().into(),
        make_cdp(16, 5, 2, None).unwrap().into(),
        make_cdp(20, 3, 3, Some((4, 5))).unwrap().into(),
    ];
    for model in &models {
        let (n, m) = (model.signal_len(), model.measurement_count());
        for t in 0..100 {
            let x = gaussian_vec(n, 1000 + t);
            let w = complex_vec(m, 2000 + t);
            let lhs: f64 = as_complex(&model.apply(&x).unwrap())
                .iter()
                .zip(&w)
                .map(|(a, b)| (a.conj() * b).re)
                .sum();
            let atw = model.adjoint_real(&MeasurementVector::Complex(w)).unwrap();
            let rhs: f64 = x.iter().zip(atw.iter()).map(|(a, b)| a * b).sum();
            assert!(
                (lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0),
                "{:?} trial {t}: {lhs} vs {rhs}",
                model.kind()
            );
        }
        let zero = model
            .adjoint_real(&MeasurementVector::Complex(vec![Complex64::default(); m]))
            .unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
    }
}

#[test]
fn cdp_energy_is_parseval_per_mask() {
    for &(n, p, grid) in &[(64, 10, None), (48, 7, Some((6, 8)))] {
        let model = make_cdp(n, p, 11, grid).unwrap();
        let x = gaussian_vec(n, 12);
        let y: f64 = model.intensities(&x).unwrap().iter().sum();
        let expected: f64 = (0..p)
            .map(|q| {
                model
                    .mask(q)
                    .iter()
                    .zip(&x)
                    .map(|(d, v)| (d * v).powi(2))
                    .sum::<f64>()
            })
            .sum::<f64>()
            * n as f64;
        assert!((y - expected).abs() <= 1e-8 * expected);
    }
}

#[test]
fn gradient_and_hessian_match_finite_differences() {
    let models: Vec<MeasurementModel> = vec![
        make_gaussian(16, 200, 21).unwrap().into(),
        make_cdp(16, 8, 22, None).unwrap().into(),
        make_cdp(16, 6, 23, Some((4, 4))).unwrap().into(),
    ];
    for (k, model) in models.into_iter().enumerate() {
        let truth = RealSignal::new(gaussian_vec(16, 30 + k as u64)).unwrap();
        let p = ProblemInstance::from_truth(model, truth).unwrap();
        let mut worst = (0.0f64, 0.0f64);
        for t in 0..50 {
            let x = gaussian_vec(16, 10_000 + 100 * k as u64 + t);
            let g = p.f_gradient(&x).unwrap();
            worst.0 = worst.0.max(rel_diff(&fd_gradient(&p, &x), &g));
            let v = gaussian_vec(16, 7000 + t);
            let hv = p.hessian_vecprod(&x, &v).unwrap();
            worst.1 = worst.1.max(rel_diff(&fd_hessian_vec(&p, &x, &v), &hv));
        }
        assert!(worst.0 <= 1e-5, "model {k}: gradient error {:e}", worst.0);
        assert!(worst.1 <= 1e-4, "model {k}: hessian error {:e}", worst.1);
    }
}

#[test]
fn gaussian_hessian_matches_dense_formula() {
    let truth = RealSignal::new(gaussian_vec(8, 1)).unwrap();
    let p = ProblemInstance::from_truth(make_gaussian(8, 60, 2).unwrap(), truth).unwrap();
    let x = gaussian_vec(8, 3);
    let h = dense_gaussian_hessian(&p, &x);
    for t in 0..10 {
        let v = gaussian_vec(8, 10 + t);
        let hv = p.hessian_vecprod(&x, &v).unwrap();
        assert!(rel_diff(&hv, &matvec(&h, &v)) <= 1e-12);
    }
}

#[test]
fn cubic_matches_bisection_on_log_grid() {
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let c = 10f64.powf(-12.0 + 24.0 * i as f64 / 999.0);
        let t = solve_mirror_cubic(c).unwrap();
        worst = worst.max((t - cubic_bisection(c)).abs());
    }
    assert!(worst <= 1e-12, "worst {worst:e}");
    assert_eq!(solve_mirror_cubic(0.0).unwrap(), 1.0);
    assert!((solve_mirror_cubic(1.0).unwrap() - cubic_bisection(1.0)).abs() <= 1e-12);
}

#[test]
fn mirror_step_inverts_kernel_gradient() {
    for s in 0..20 {
        let x = gaussian_vec(8, s);
        let g = gaussian_vec(8, 100 + s);
        let step = mirror_step(&x, &g, 0.1).unwrap();
        let q = step.next_point.as_slice();
        let lhs: Vec<f64> = q
            .iter()
            .map(|v| (common::norm(q).powi(2) + 1.0) * v)
            .collect();
        let nx = common::norm(&x).powi(2) + 1.0;
        let p: Vec<f64> = x.iter().zip(&g).map(|(a, b)| nx * a - 0.1 * b).collect();
        let err: f64 = lhs
            .iter()
            .zip(&p)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-10, "seed {s}: {err:e}");
    }
}

#[test]
fn bregman_matches_definition_by_quadrature() {
    // D(x, u) = ∫₀¹ ⟨∇ψ(u + s(x−u)) − ∇ψ(u), x − u⟩ ds, Simpson's rule
    for s in 0..10 {
        let x = gaussian_vec(5, s);
        let u = gaussian_vec(5, 50 + s);
        let d: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a - b).collect();
        let grad = |z: &[f64]| -> Vec<f64> {
            let k = common::norm(z).powi(2) + 1.0;
            z.iter().map(|v| k * v).collect()
        };
        let gu = grad(&u);
        let integrand = |t: f64| -> f64 {
            let z: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            grad(&z)
                .iter()
                .zip(&gu)
                .zip(&d)
                .map(|((a, b), c)| (a - b) * c)
                .sum()
        };
        let steps = 200;
        let hstep = 1.0 / steps as f64;
        let mut acc = integrand(0.0) + integrand(1.0);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * integrand(i as f64 * hstep);
        }
        let quad = acc * hstep / 3.0;
        let value = bregman_entropy(&x, &u).unwrap();
        assert!(
            (value - quad).abs() <= 1e-9 * quad.abs().max(1.0),
            "{value} vs {quad}"
        );
    }
}

#[test]
fn spectral_operator_matches_dense_matrix() {
    let models: Vec<MeasurementModel> = vec![
        make_gaussian(8, 64, 5).unwrap().into(),
        make_cdp(8, 4, 6, None).unwrap().into(),
    ];
    for model in models {
        let truth = RealSignal::new(gaussian_vec(8, 7)).unwrap();
        let p = ProblemInstance::from_truth(model, truth).unwrap();
        let y = dense_spectral_matrix(&p);
        for t in 0..5 {
            let v = gaussian_vec(8, 40 + t);
            let fast = spectral_operator(&p, &v).unwrap();
            assert!(rel_diff(&fast, &matvec(&y, &v)) <= 1e-12);
        }
    }
}
