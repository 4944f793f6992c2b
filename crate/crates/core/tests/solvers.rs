mod common;

use common::*;
use mirror_pr::bregman::mirror_step;
use mirror_pr::experiment::{run_trial, unit_truth, AlgorithmChoice, ExperimentConfig, InitChoice};
use mirror_pr::initialization::random_init;
use mirror_pr::measurements::{make_cdp, make_gaussian, MeasurementModel};
use mirror_pr::objective::ProblemInstance;
use mirror_pr::solvers::{
    backtracking_violations, fit_linear_tail, mirror_descent, monotonicity_violations,
    polyak_subgradient, verify_descent_inequality, wirtinger_flow, SolverParams, Status, StepMode,
};
use proptest::prelude::*;

fn gaussian_problem(n: usize, m: usize, seed: u64) -> ProblemInstance {
    let truth = unit_truth(n, seed + 1).unwrap();
    ProblemInstance::from_truth(make_gaussian(n, m, seed).unwrap(), truth).unwrap()
}

#[test]
fn every_solver_stops_at_the_truth() {
    for model in [
        MeasurementModel::from(make_gaussian(10, 80, 1).unwrap()),
        MeasurementModel::from(make_cdp(10, 4, 2, None).unwrap()),
    ] {
        let truth = unit_truth(10, 3).unwrap();
        let p = ProblemInstance::from_truth(model, truth.clone()).unwrap();
        let params = SolverParams::default();
        for trace in [
            mirror_descent(&p, &truth, &params).unwrap(),
            wirtinger_flow(&p, &truth, &params).unwrap(),
            polyak_subgradient(&p, &truth, &params).unwrap(),
        ] {
            assert_eq!(trace.iterations(), 0, "{:?}", trace.algorithm);
            assert_eq!(trace.final_point, truth);
        }
        let p = p.without_truth();
        let trace = mirror_descent(&p, &truth, &params).unwrap();
        assert_eq!(
            (trace.iterations(), trace.status),
            (0, Status::ConvergedGrad)
        );
    }
}

#[test]
fn descent_inequality_flags_oversized_steps() {
    let p = gaussian_problem(8, 64, 10);
    let x0 = random_init(8, 1.0, 11);
    let params = SolverParams {
        max_iters: 5,
        grad_tol: 0.0,
        store_iterates: true,
        ..SolverParams::constant(2.0)
    };
    let trace = mirror_descent(&p, &x0, &params).unwrap();
    let report = verify_descent_inequality(&p, &trace).unwrap();
    assert!(
        !report.all_hold(),
        "a step far beyond 1/L must break the bound"
    );
    let smooth: Vec<usize> = backtracking_violations(&trace)
        .iter()
        .map(|k| k - 1)
        .collect();
    for k in report.violations() {
        assert!(
            smooth.contains(&k),
            "step {k} breaks the bound without a smoothness violation"
        );
    }
}

#[test]
fn backtracking_runs_satisfy_every_invariant() {
    for (k, model) in [
        MeasurementModel::from(make_gaussian(16, 120, 20).unwrap()),
        MeasurementModel::from(make_cdp(16, 12, 21, None).unwrap()),
        MeasurementModel::from(make_cdp(16, 12, 22, Some((4, 4))).unwrap()),
    ]
    .into_iter()
    .enumerate()
    {
        let truth = unit_truth(16, 23).unwrap();
        let p = ProblemInstance::from_truth(model, truth).unwrap();
        let params = SolverParams {
            max_iters: 3000,
            store_iterates: true,
            ..Default::default()
        };
        let trace = mirror_descent(&p, &random_init(16, 1.0, 24), &params).unwrap();
        assert_eq!(trace.status, Status::ConvergedError, "model {k}");
        assert!(monotonicity_violations(&trace).is_empty());
        assert!(backtracking_violations(&trace).is_empty());
        assert!(verify_descent_inequality(&p, &trace).unwrap().all_hold());
        for r in &trace.records {
            assert!((r.gamma_k * r.l_k - (1.0 - params.kappa)).abs() < 1e-12);
        }
    }
}

#[test]
fn constant_step_runs_are_bit_identical() {
    let p = gaussian_problem(16, 200, 30);
    let x0 = random_init(16, 1.0, 31);
    let params = SolverParams {
        max_iters: 100,
        ..SolverParams::constant(0.99 / 3.0)
    };
    let a = mirror_descent(&p, &x0, &params).unwrap();
    let b = mirror_descent(&p, &x0, &params).unwrap();
    assert_eq!(a.final_point, b.final_point);
    let (mut ca, mut cb) = (Vec::new(), Vec::new());
    a.write_csv(&mut ca).unwrap();
    b.write_csv(&mut cb).unwrap();
    assert_eq!(ca, cb);
}

#[test]
fn cdp_spectral_decay_is_eventually_linear() {
    let cfg = ExperimentConfig {
        model: mirror_pr::measurements::ModelKind::Cdp,
        n: 64,
        init: InitChoice::Spectral,
        step_mode: StepMode::Constant(0.99 / 2.0),
        max_iters: 3000,
        ..Default::default()
    };
    let run = run_trial(&cfg, 64, 60, 0).unwrap();
    assert!(run.succeeded(1e-5));
    let fit = fit_linear_tail(&run.trace.rel_errs().unwrap(), 0.99).unwrap();
    assert!(fit.factor < 1.0 && fit.end + 1 - fit.start >= 10, "{fit:?}");
}

fn paired_success(cfg: &ExperimentConfig, n: usize, m: usize, trials: usize) -> usize {
    (0..trials)
        .filter(|&t| run_trial(cfg, n, m, t).unwrap().succeeded(cfg.success_tol))
        .count()
}

#[test]
fn wirtinger_flow_tracks_mirror_descent() {
    let n = 64;
    let m = (4.0 * n as f64 * (n as f64).ln()).ceil() as usize;
    let md = ExperimentConfig {
        n,
        init: InitChoice::Spectral,
        step_mode: StepMode::Constant(0.99 / 3.0),
        max_iters: 3000,
        master_seed: 3,
        ..Default::default()
    };
    let wf = ExperimentConfig {
        algorithm: AlgorithmChoice::Wf,
        ..md.clone()
    };
    let trials = 30;
    let a = paired_success(&md, n, m, trials) as f64 / trials as f64;
    let b = paired_success(&wf, n, m, trials) as f64 / trials as f64;
    assert!((a - b).abs() <= 0.15, "md {a} wf {b}");
}

#[test]
fn polyak_is_not_worse_than_mirror_descent() {
    let n = 64;
    let md = ExperimentConfig {
        n,
        init: InitChoice::Spectral,
        step_mode: StepMode::Backtracking,
        max_iters: 2000,
        master_seed: 4,
        ..Default::default()
    };
    let polyak = ExperimentConfig {
        algorithm: AlgorithmChoice::Polyak,
        max_iters: 5000,
        ..md.clone()
    };
    let trials = 30;
    for ratio in [3, 4, 6] {
        let m = ratio * n;
        let a = paired_success(&md, n, m, trials) as f64 / trials as f64;
        let b = paired_success(&polyak, n, m, trials) as f64 / trials as f64;
        assert!(b >= a - 0.10, "m/n {ratio}: md {a} polyak {b}");
    }
}

#[test]
fn polyak_reports_stall_on_vanishing_subgradient() {
    // x = 0 has zero subgradient while g(0) = mean(y) > 0
    let p = gaussian_problem(6, 40, 40);
    let trace = polyak_subgradient(&p, &[0.0; 6], &SolverParams::default()).unwrap();
    assert_eq!(trace.status, Status::Stalled);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mirror_map_moves_at_most_gamma_times_gradient(
        seed in 0u64..10_000,
        gamma in 1e-3f64..1.0,
    ) {
        // ∇ψ is 1-strongly monotone, so ‖F(x) − x‖ ≤ ‖∇ψ(F(x)) − ∇ψ(x)‖ = γ‖∇f(x)‖
        let p = gaussian_problem(8, 60, 50);
        let x = random_init(8, 2.0, seed);
        let g = p.f_gradient(&x).unwrap();
        let step = mirror_step(&x, &g, gamma).unwrap();
        let moved = rel_diff(&step.next_point, &x) * norm(&x);
        prop_assert!(moved <= gamma * norm(&g) * (1.0 + 1e-10) + 1e-14);
    }

    #[test]
    fn traces_descend_from_any_start(seed in 0u64..10_000, scale in 0.1f64..3.0) {
        let p = gaussian_problem(6, 50, 60);
        let params = SolverParams { max_iters: 50, ..Default::default() };
        let trace = mirror_descent(&p, &random_init(6, scale, seed), &params).unwrap();
        prop_assert!(monotonicity_violations(&trace).is_empty());
        prop_assert!(backtracking_violations(&trace).is_empty());
    }
}
