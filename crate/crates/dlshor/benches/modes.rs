//! Benchmarks the data-parallel hot paths. Benchmark ids carry the active
//! execution mode, so runs with and without the `parallel` feature land as
//! separate criterion baselines:
//!
//! ```text
//! cargo bench -p dlshor                           # parallel (default)
//! cargo bench -p dlshor --no-default-features     # sequential fallback
//! ```

use criterion::{criterion_group, criterion_main, Criterion};
use rug::Integer;

use dlshor::histogram;
use dlshor::oracle::exact_distribution;
use dlshor::quadrature::{capture_probability, QuadratureConfig};
use dlshor::{ProblemInstance, PublicInstance};

fn mode() -> &'static str {
    if dlshor::PARALLEL {
        "parallel"
    } else {
        "sequential"
    }
}

fn bench_capture(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    let r = (Integer::from(1) << 128u32) - 1u32;
    let pub_inst = PublicInstance::new(128, 2, r).unwrap();
    let mut group = c.benchmark_group("capture_probability_m128_b10");
    group.sample_size(10);
    group.bench_function(mode(), |b| {
        b.iter(|| capture_probability(&pub_inst, 10, &cfg).unwrap())
    });
    group.finish();
}

fn bench_histogram_build(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    let inst = ProblemInstance::new(16, 3, Integer::from(65521), Integer::from(31337)).unwrap();
    let mut group = c.benchmark_group("histogram_build_m16_b4");
    group.sample_size(10);
    group.bench_function(mode(), |b| {
        b.iter(|| histogram::build(&inst, 4, 2, &cfg).unwrap())
    });
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let inst = ProblemInstance::new(6, 2, Integer::from(61), Integer::from(17)).unwrap();
    let mut group = c.benchmark_group("oracle_distribution_m6_ell2");
    group.sample_size(10);
    group.bench_function(mode(), |b| b.iter(|| exact_distribution(&inst).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_capture, bench_histogram_build, bench_oracle);
criterion_main!(benches);
