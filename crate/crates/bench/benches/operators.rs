use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mirror_pr::bregman::{mirror_step, solve_mirror_cubic};
use mirror_pr::initialization::random_init;
use mirror_pr::measurements::{make_cdp, make_gaussian, MeasurementModel, MeasurementOperator};

fn models() -> Vec<(&'static str, MeasurementModel)> {
    vec![
        (
            "gaussian_128x29243",
            make_gaussian(128, 29_243, 1).unwrap().into(),
        ),
        ("cdp_128_p800", make_cdp(128, 800, 1, None).unwrap().into()),
        (
            "cdp_32x32_p100",
            make_cdp(1024, 100, 1, Some((32, 32))).unwrap().into(),
        ),
    ]
}

fn apply_adjoint(c: &mut Criterion) {
    let mut group = c.benchmark_group("operator");
    group.sample_size(20);
    for (name, model) in models() {
        let x = random_init(model.signal_len(), 1.0, 7);
        let ax = model.apply(&x).unwrap();
        group.bench_with_input(BenchmarkId::new("apply", name), &x, |b, x| {
            b.iter(|| model.apply(black_box(x)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("adjoint", name), &ax, |b, w| {
            b.iter(|| model.adjoint_real(black_box(w)).unwrap())
        });
    }
    group.finish();
}

fn mirror(c: &mut Criterion) {
    c.bench_function("solve_mirror_cubic", |b| {
        b.iter(|| solve_mirror_cubic(black_box(37.5)).unwrap())
    });
    let x = random_init(1024, 1.0, 1);
    let g = random_init(1024, 1.0, 2);
    c.bench_function("mirror_step_1024", |b| {
        b.iter(|| mirror_step(black_box(&x), black_box(&g), 0.33).unwrap())
    });
}

criterion_group!(benches, apply_adjoint, mirror);
criterion_main!(benches);
