//! Quick invariant checks run by `mirror-pr selftest`.

use mirror_pr::bregman::{bregman_entropy, solve_mirror_cubic};
use mirror_pr::experiment::{unit_truth, ExperimentConfig, InitChoice, SampleSize};
use mirror_pr::initialization::random_init;
use mirror_pr::measurements::{make_cdp, make_gaussian, MeasurementModel, MeasurementOperator};
use mirror_pr::objective::ProblemInstance;
use mirror_pr::signal::{distance, dot, norm_sq};
use mirror_pr::solvers::{backtracking_violations, monotonicity_violations, StepMode};

type Check = fn() -> Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn models() -> Result<Vec<MeasurementModel>, String> {
    let e = |e: mirror_pr::Error| e.to_string();
    Ok(vec![
        make_gaussian(12, 90, 1).map_err(e)?.into(),
        make_cdp(12, 6, 2, None).map_err(e)?.into(),
        make_cdp(12, 4, 3, Some((3, 4))).map_err(e)?.into(),
    ])
}

fn cubic_root() -> Result<(), String> {
    for i in 0..200 {
        let c = 10f64.powf(-8.0 + 16.0 * i as f64 / 199.0);
        let t = solve_mirror_cubic(c).map_err(|e| e.to_string())?;
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if c * mid * mid * mid + mid - 1.0 > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        ensure((t - 0.5 * (lo + hi)).abs() <= 1e-12, || {
            format!("c = {c:e}: {t} vs bisection {lo}")
        })?;
    }
    Ok(())
}

fn bregman_bounds() -> Result<(), String> {
    for s in 0..100 {
        let x = random_init(7, 2.0, 2 * s);
        let u = random_init(7, 2.0, 2 * s + 1);
        let d = bregman_entropy(&x, &u).map_err(|e| e.to_string())?;
        let floor = 0.5 * distance(&x, &u).powi(2);
        ensure(d >= floor * (1.0 - 1e-12), || {
            format!("D = {d} below {floor}")
        })?;
    }
    Ok(())
}

fn adjoint_identity() -> Result<(), String> {
    for model in models()? {
        for s in 0..10 {
            let x = random_init(12, 1.0, 100 + s);
            let ax = model.apply(&x).map_err(|e| e.to_string())?;
            let w = model
                .apply(&random_init(12, 1.0, 200 + s))
                .map_err(|e| e.to_string())?;
            let lhs = ax.re_inner(&w);
            let rhs = dot(&x, &model.adjoint_real(&w).map_err(|e| e.to_string())?);
            ensure((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0), || {
                format!("{:?}: <Ax, w> = {lhs}, <x, A*w> = {rhs}", model.kind())
            })?;
        }
    }
    Ok(())
}

fn gradient_matches_differences() -> Result<(), String> {
    for (k, model) in models()?.into_iter().enumerate() {
        let truth = unit_truth(12, 7 + k as u64).map_err(|e| e.to_string())?;
        let p = ProblemInstance::from_truth(model, truth).map_err(|e| e.to_string())?;
        let x = random_init(12, 1.0, 300 + k as u64);
        let g = p.f_gradient(&x).map_err(|e| e.to_string())?;
        let h = 1e-5 * (1.0 + norm_sq(&x).sqrt());
        let mut fd = vec![0.0; 12];
        for (i, d) in fd.iter_mut().enumerate() {
            let (mut up, mut dn) = (x.to_vec(), x.to_vec());
            up[i] += h;
            dn[i] -= h;
            *d = (p.f_value(&up).unwrap() - p.f_value(&dn).unwrap()) / (2.0 * h);
        }
        let err = distance(&fd, &g) / norm_sq(&g).sqrt().max(1e-12);
        ensure(err <= 1e-5, || {
            format!("model {k}: relative gradient error {err:e}")
        })?;
    }
    Ok(())
}

fn small_recovery() -> Result<(), String> {
    let cfg = ExperimentConfig {
        n: 10,
        measurements: SampleSize::Count(120),
        init: InitChoice::Spectral,
        step_mode: StepMode::Backtracking,
        max_iters: 2000,
        ..Default::default()
    };
    for t in 0..3 {
        let run = mirror_pr::experiment::run_trial(&cfg, 10, 120, t).map_err(|e| e.to_string())?;
        let err = run.trace.final_rel_err().unwrap_or(f64::NAN);
        ensure(run.succeeded(cfg.success_tol), || {
            format!("trial {t}: rel_err {err:e}")
        })?;
        ensure(monotonicity_violations(&run.trace).is_empty(), || {
            format!("trial {t}: f increased")
        })?;
        ensure(backtracking_violations(&run.trace).is_empty(), || {
            format!("trial {t}: accepted step violates D_f <= L D_psi")
        })?;
    }
    Ok(())
}

const CHECKS: [(&str, Check); 5] = [
    ("cubic root vs bisection", cubic_root),
    ("bregman strong convexity", bregman_bounds),
    ("adjoint identity", adjoint_identity),
    (
        "gradient vs finite differences",
        gradient_matches_differences,
    ),
    ("small recovery with descent invariants", small_recovery),
];

/// Runs every check, printing one line each; true when all pass.
pub fn run() -> bool {
    let mut all = true;
    for (name, check) in CHECKS {
        match check() {
            Ok(()) => println!("PASS {name}"),
            Err(msg) => {
                all = false;
                println!("FAIL {name}: {msg}");
            }
        }
    }
    all
}
