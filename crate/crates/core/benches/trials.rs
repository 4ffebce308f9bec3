use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use collapse_core::exec::Execution;
use collapse_core::protocols::{
    random_audits, run_protocol1_with, run_protocol2_with, PairFamily, Protocol1Params, Protocol2Params,
};
use collapse_core::GaussianPacket;

fn modes() -> Vec<(&'static str, Execution)> {
    let mut m = vec![("sequential", Execution::Sequential)];
    #[cfg(feature = "parallel")]
    m.push(("parallel", Execution::Parallel));
    m
}

fn protocol1(c: &mut Criterion) {
    let mut group = c.benchmark_group("protocol1");
    group.sample_size(20);
    for n in [10_000u64, 100_000] {
        let params = Protocol1Params { n_trials: n, ..Default::default() };
        for (name, exec) in modes() {
            group.bench_with_input(BenchmarkId::new(name, n), &params, |b, p| {
                b.iter(|| run_protocol1_with(black_box(p), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn protocol2(c: &mut Criterion) {
    let mut group = c.benchmark_group("protocol2");
    group.sample_size(20);
    for n in [10_000u64, 100_000] {
        let params = Protocol2Params { n_trials: n, ..Default::default() };
        for (name, exec) in modes() {
            group.bench_with_input(BenchmarkId::new(name, n), &params, |b, p| {
                b.iter(|| run_protocol2_with(black_box(p), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn audit(c: &mut Criterion) {
    let mut group = c.benchmark_group("audit");
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::new(name, 1000), |b| {
            b.iter(|| random_audits(PairFamily::Mixed, 1000, 3, 1e-12, exec).unwrap())
        });
    }
    group.finish();
}

fn grid_fourier(c: &mut Criterion) {
    let grid = GaussianPacket::position(1.0, 0.0).unwrap().to_default_grid().unwrap();
    c.bench_function("grid_fourier/4096", |b| b.iter(|| black_box(&grid).fourier().unwrap()));
}

criterion_group!(benches, protocol1, protocol2, audit, grid_fourier);
criterion_main!(benches);
