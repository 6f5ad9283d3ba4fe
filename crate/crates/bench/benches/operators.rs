use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use gkw_bench::{operator, param, smooth_input};
use gkw_core::evolution::montecarlo_cdf;
use gkw_core::spectral::{lambda_by_power_with, lambda_by_ratio_with, DEFAULT_MAX_ITER};
use gkw_core::{FuncRep, OperatorKind};

fn assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble");
    group.sample_size(10);
    let m = param(2);
    for cutoff in [1_000, 10_000] {
        for (name, kind) in [
            ("gkw", OperatorKind::Gkw),
            ("u", OperatorKind::U),
            ("v", OperatorKind::V),
        ] {
            group.bench_with_input(BenchmarkId::new(name, cutoff), &cutoff, |b, &k| {
                b.iter(|| operator(kind, &m, 64, k))
            });
        }
    }
    group.finish();
}

fn apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply");
    let m = param(2);
    for degree in [32, 64, 128] {
        let v = operator(OperatorKind::V, &m, degree, 1_000);
        let f = smooth_input(&m, degree);
        group.bench_with_input(BenchmarkId::new("v", degree), &f, |b, f| {
            b.iter(|| v.apply(black_box(f)).unwrap())
        });
    }
    group.finish();
}

fn solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("lambda");
    for p in [1, 2, 10] {
        let m = param(p);
        let u = operator(OperatorKind::U, &m, 64, 10_000);
        let v = operator(OperatorKind::V, &m, 64, 10_000);
        let f0 = FuncRep::fit(|x| x, 64).unwrap();
        let start = smooth_input(&m, 64);
        group.bench_with_input(BenchmarkId::new("ratio", p), &f0, |b, f0| {
            b.iter(|| lambda_by_ratio_with(&u, f0, DEFAULT_MAX_ITER, 1e-10).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("power", p), &start, |b, s| {
            b.iter(|| lambda_by_power_with(&v, s, DEFAULT_MAX_ITER, 1e-10).unwrap())
        });
    }
    group.finish();
}

fn montecarlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("montecarlo");
    group.sample_size(10);
    let m = param(2);
    let xs: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    group.bench_function("p2_n5_100k", |b| {
        b.iter(|| montecarlo_cdf(&m, 5, 100_000, 1, &xs).unwrap())
    });
    group.finish();
}

criterion_group!(benches, assembly, apply, solvers, montecarlo);
criterion_main!(benches);
