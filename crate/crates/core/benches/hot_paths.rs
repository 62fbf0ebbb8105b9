use criterion::{criterion_group, criterion_main, Criterion};
use dirichlet_lab_core::dirichlet::{kernel, partial_sum, partial_sum_via_kernel, GridParams};
use dirichlet_lab_core::lebesgue::phi_integral;
use dirichlet_lab_core::quadrature::integrate;
use dirichlet_lab_core::{FunctionSpec, QuadratureConfig};
use std::hint::black_box;

fn kernel_evaluation(c: &mut Criterion) {
    let grid = GridParams::new(10.0, 64).unwrap();
    // Points spanning the cosine-sum switch region near the center and the
    // sine-ratio bulk.
    let points: Vec<f64> = (0..1024)
        .map(|i| -10.0 + 20.0 * i as f64 / 1023.0)
        .collect();
    c.bench_function("kernel_1024_points", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for &t in &points {
                acc += kernel(black_box(&grid), black_box(t));
            }
            acc
        })
    });
}

fn oscillatory_integration(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    let w = 40.0 * std::f64::consts::PI;
    c.bench_function("integrate_hinted_cosine", |b| {
        b.iter(|| integrate(|t: f64| (w * t).cos(), 0.0, 5.0, black_box(w), &cfg).unwrap())
    });
    let f = FunctionSpec::parse("sin(3*t)*exp(-t^2/50)").unwrap();
    c.bench_function("phi_integral_with_sign_cuts", |b| {
        b.iter(|| phi_integral(black_box(&f), 0.7, 8.0, &cfg).unwrap())
    });
}

fn partial_sum_routes(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    let f = FunctionSpec::parse("sin(t) + 0.5*cos(3*t)").unwrap();
    let grid = GridParams::new(8.0, 32).unwrap();
    c.bench_function("partial_sum_coefficient_route", |b| {
        b.iter(|| partial_sum(black_box(&f), 0.4, &grid, &cfg).unwrap().value)
    });
    c.bench_function("partial_sum_kernel_route", |b| {
        b.iter(|| {
            partial_sum_via_kernel(black_box(&f), 0.4, &grid, &cfg)
                .unwrap()
                .value
        })
    });
}

criterion_group!(
    benches,
    kernel_evaluation,
    oscillatory_integration,
    partial_sum_routes
);
criterion_main!(benches);
