use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use milnor_core::intersect::{cross_validate, IntersectionScenario};
use milnor_core::par::{self, ExecutionPolicy};
use milnor_core::verify::{case_rng, random_scenario, run_suites, Suite};

fn scenarios(n: usize) -> Vec<IntersectionScenario> {
    (0..n)
        .map(|i| random_scenario(&mut case_rng(1, Suite::Intersect, "bench", i)))
        .collect()
}

fn policies() -> [(&'static str, ExecutionPolicy); 2] {
    [
        ("sequential", ExecutionPolicy::Sequential),
        ("parallel", ExecutionPolicy::Parallel),
    ]
}

fn cross_validate_batch(c: &mut Criterion) {
    let batch = scenarios(64);
    let mut g = c.benchmark_group("cross_validate_64");
    for (name, policy) in policies() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                // the inner formulas stay sequential so only the batch level differs
                par::map(policy, &batch, |sc| {
                    cross_validate(black_box(sc), &[], None, ExecutionPolicy::Sequential).agree
                })
            })
        });
    }
    g.finish();
}

fn verify_suites(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify_all_20_cases");
    g.sample_size(20);
    for (name, policy) in policies() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_suites(&[], black_box(3), 20, policy).pass())
        });
    }
    g.finish();
}

criterion_group!(benches, cross_validate_batch, verify_suites);
criterion_main!(benches);
