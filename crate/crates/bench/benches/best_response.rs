use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use netsel_bench::{grid_instance, pmfs_for_user0};
use netsel_core::best_response::{best_response, NetworkTimeGraph};
use netsel_core::stats::poisson_binomial;

fn bench_best_response(c: &mut Criterion) {
    let mut group = c.benchmark_group("best_response");
    for users in [15, 50] {
        let inst = grid_instance(users, 7);
        let pmfs = pmfs_for_user0(&inst);
        let pattern = &inst.type_spaces[0].patterns()[0];
        group.bench_with_input(BenchmarkId::new("graph_build", users), &users, |b, _| {
            b.iter(|| NetworkTimeGraph::build(&inst.system, 0, black_box(pattern), &pmfs).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("solve", users), &users, |b, _| {
            b.iter(|| best_response(&inst.system, 0, black_box(pattern), &pmfs, None).unwrap())
        });
    }
    group.finish();
}

fn bench_pmf(c: &mut Criterion) {
    let mut group = c.benchmark_group("poisson_binomial");
    for n in [8usize, 64, 256] {
        let probs: Vec<f64> = (0..n).map(|i| ((i * 37) % 100) as f64 / 100.0).collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &probs, |b, probs| {
            b.iter(|| poisson_binomial(black_box(probs).iter().copied(), n + 1))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_best_response, bench_pmf);
criterion_main!(benches);
