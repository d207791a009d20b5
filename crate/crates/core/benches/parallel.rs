use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use renewal_clt::cli;
use renewal_clt::config::ExperimentConfig;
use renewal_clt::constants::Constants;
use renewal_clt::distributions::DistributionSpec;
use renewal_clt::mc::{simulate_counts_with, SimOptions};
use renewal_clt::verify;
use renewal_clt::Execution;

fn strategies() -> [(&'static str, Execution); 2] {
    [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Auto),
    ]
}

fn simulation(c: &mut Criterion) {
    let spec = DistributionSpec::gamma(2.0, 1.0).unwrap();
    let mut group = c.benchmark_group("simulate_counts");
    group.sample_size(10);
    for (name, exec) in strategies() {
        group.bench_with_input(BenchmarkId::new(name, 20_000), &exec, |b, &exec| {
            let opts = SimOptions {
                exec,
                ..SimOptions::default()
            };
            b.iter(|| simulate_counts_with(black_box(&spec), 200.0, 20_000, 1, opts).unwrap())
        });
    }
    group.finish();
}

fn bound_grid(c: &mut Criterion) {
    let cfg = ExperimentConfig::new(DistributionSpec::gamma(2.0, 1.0).unwrap(), vec![1000.0]);
    let constants = Constants::default();
    let mut group = c.benchmark_group("bound_table");
    group.sample_size(10);
    for (name, exec) in strategies() {
        group.bench_function(name, |b| {
            b.iter(|| cli::bound_table(black_box(&cfg), &constants, exec).unwrap())
        });
    }
    group.finish();
}

fn verification(c: &mut Criterion) {
    let constants = Constants::default();
    let all = vec!["all".to_string()];
    let mut group = c.benchmark_group("verify_all");
    group.sample_size(10);
    for (name, exec) in strategies() {
        group.bench_function(name, |b| {
            b.iter(|| verify::run(&all, &constants, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, simulation, bound_grid, verification);
criterion_main!(benches);
