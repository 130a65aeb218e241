use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use riesz_lasso::sim::wishart_extreme_trials;
use riesz_lasso::{gersgorin_certificate, lambda_max, solve_lasso, sparse_extremes_exact, DEFAULT_ALPHA_GRID};
use riesz_lasso_bench::regression_problem;

fn lasso(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_lasso");
    for &(n, p) in &[(100, 200), (200, 500), (400, 800)] {
        let (x, y) = regression_problem(n, p, 5, 1);
        let lambda = 0.1 * lambda_max(&x, &y);
        g.bench_with_input(BenchmarkId::from_parameter(format!("{n}x{p}")), &lambda, |b, &l| {
            b.iter(|| solve_lasso(black_box(&x), black_box(&y), l, 1e-8, 100_000).unwrap())
        });
    }
    g.finish();
}

fn certification(c: &mut Criterion) {
    let mut g = c.benchmark_group("certify");
    let (x, _) = regression_problem(60, 20, 2, 2);
    for m in [2, 4, 6] {
        g.bench_with_input(BenchmarkId::new("exact", m), &m, |b, &m| {
            b.iter(|| sparse_extremes_exact(black_box(&x), m, 1 << 20).unwrap())
        });
    }
    let (x, _) = regression_problem(200, 300, 2, 3);
    g.bench_function("gersgorin_rank_20", |b| {
        b.iter(|| gersgorin_certificate(black_box(&x), 20, &DEFAULT_ALPHA_GRID, 1).unwrap())
    });
    g.finish();
}

fn wishart(c: &mut Criterion) {
    c.bench_function("wishart_m10_n200_x100", |b| {
        b.iter(|| wishart_extreme_trials(10, 200, 100, black_box(7), 0.16, 2.56).unwrap())
    });
}

criterion_group!(benches, lasso, certification, wishart);
criterion_main!(benches);
