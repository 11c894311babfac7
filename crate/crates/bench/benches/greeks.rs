use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use viewhedge_core::fd::fd_validate;
use viewhedge_core::greeks::greeks;
use viewhedge_core::hedge::n_star;
use viewhedge_core::variance::{coefficients, minimize_f};
use viewhedge_core::{MarketView, OptionSpec, VolProcessSpec};

fn bench(c: &mut Criterion) {
    let spec = OptionSpec::new(100.0, 105.0, 0.05, 0.2, 0.25).unwrap();
    let view = MarketView { mu: 0.08, dt: 0.02, vol_process: VolProcessSpec::ornstein_uhlenbeck(0.2, 2.0, 0.3, 0.3) };
    c.bench_function("greeks", |b| b.iter(|| greeks(black_box(&spec)).unwrap()));
    let g = greeks(&spec).unwrap();
    c.bench_function("n_star", |b| b.iter(|| n_star(black_box(&g), &view, 100.0, 0.05)));
    c.bench_function("coefficients+minimize", |b| {
        b.iter(|| minimize_f(&coefficients(black_box(&g), &view, 100.0, 0.05, 0.2)).unwrap())
    });
    c.bench_function("fd_validate", |b| b.iter(|| fd_validate(black_box(&spec), 1e-5).unwrap()));
}

criterion_group!(benches, bench);
criterion_main!(benches);
