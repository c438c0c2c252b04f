//! Sequential vs rayon execution of the parallel workloads: suite trials and search restarts.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fongtsui::conjecture::{counterexample_search, run_suite, SearchParams, SuiteConfig, SuiteId};
use fongtsui::linalg::Tolerances;
use fongtsui::par::Execution;

fn modes() -> Vec<Execution> {
    let mut v = vec![Execution::Sequential];
    if Execution::available() == Execution::Parallel {
        v.push(Execution::Parallel);
    }
    v
}

fn suites(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("findim11_64_trials");
    group.sample_size(10);
    for mode in modes() {
        let mut config = SuiteConfig::new(64, 2..=8, 42);
        config.execution = mode;
        group.bench_with_input(BenchmarkId::from_parameter(format!("{mode:?}")), &config, |b, cfg| {
            b.iter(|| run_suite(SuiteId::Findim11, cfg, &tol).unwrap())
        });
    }
    group.finish();
}

fn search(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("search_dim4_16_restarts");
    group.sample_size(10);
    for mode in modes() {
        let mut params = SearchParams::new(4, 16, 100, 0.1, 7);
        params.execution = mode;
        group.bench_with_input(BenchmarkId::from_parameter(format!("{mode:?}")), &params, |b, p| {
            b.iter(|| counterexample_search(p, &tol).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, suites, search);
criterion_main!(benches);
