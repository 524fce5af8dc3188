//! Throughput of the sampling oracles and the exponent optimizer.
//!
//! With the default `parallel` feature the Monte Carlo benches sweep worker
//! counts on dedicated rayon pools; built with `--no-default-features` the
//! same benches measure the sequential fallback, so the two configurations
//! can be compared directly:
//!
//! ```text
//! cargo bench -p tailbound
//! cargo bench -p tailbound --no-default-features
//! ```

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use tailbound::chernoff::MgfHandle;
use tailbound::model::{Direction, TailQuery};
use tailbound::oracle::{
    efron_stein_estimate, exact_binomial_tail, mc_tail_estimate, Aggregate, Distribution, EsMode,
    SamplerSpec,
};
use tailbound::scenarios::kde_l1_box_aggregate;

fn coin_sampler() -> SamplerSpec {
    SamplerSpec::new(Distribution::Bernoulli { p: 0.5 }, 100, Aggregate::Sum)
}

fn bench_mc_tail(c: &mut Criterion) {
    let spec = coin_sampler();
    let query = TailQuery::upper_level(60.0);
    let samples = 200_000u64;
    let mut group = c.benchmark_group("mc_tail_estimate/coin-200k");
    group.throughput(Throughput::Elements(samples));
    #[cfg(feature = "parallel")]
    for threads in [1usize, 2, 4, 8] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        group.bench_with_input(BenchmarkId::new("workers", threads), &threads, |b, _| {
            b.iter(|| {
                pool.install(|| {
                    mc_tail_estimate(black_box(&spec), black_box(&query), samples, 7).unwrap()
                })
            })
        });
    }
    #[cfg(not(feature = "parallel"))]
    group.bench_function("sequential", |b| {
        b.iter(|| mc_tail_estimate(black_box(&spec), black_box(&query), samples, 7).unwrap())
    });
    group.finish();
}

fn bench_efron_stein(c: &mut Criterion) {
    let kde = SamplerSpec::new(
        Distribution::Uniform { lo: 0.0, hi: 1.0 },
        50,
        Aggregate::Custom(kde_l1_box_aggregate(50)),
    );
    let outer = 500u64;
    let mut group = c.benchmark_group("efron_stein/kde-50");
    group.sample_size(20);
    group.throughput(Throughput::Elements(outer));
    #[cfg(feature = "parallel")]
    for threads in [1usize, 4] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        group.bench_with_input(BenchmarkId::new("workers", threads), &threads, |b, _| {
            b.iter(|| {
                pool.install(|| {
                    efron_stein_estimate(black_box(&kde), outer, 2, 3, EsMode::CoupledRedraw)
                        .unwrap()
                })
            })
        });
    }
    #[cfg(not(feature = "parallel"))]
    group.bench_function("sequential", |b| {
        b.iter(|| {
            efron_stein_estimate(black_box(&kde), outer, 2, 3, EsMode::CoupledRedraw).unwrap()
        })
    });
    group.finish();
}

fn bench_exact_tail(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_binomial_tail");
    group.bench_function("lottery-1e6", |b| {
        b.iter(|| exact_binomial_tail(black_box(1_000_000), 1e-4, 200, Direction::Upper).unwrap())
    });
    group.bench_function("median-1e4", |b| {
        b.iter(|| exact_binomial_tail(black_box(10_000), 0.5, 5_000, Direction::Upper).unwrap())
    });
    group.finish();
}

fn bench_chernoff_optimize(c: &mut Criterion) {
    let mgf = MgfHandle::binomial(100, 0.5).unwrap();
    c.bench_function("chernoff_optimize/binomial-100", |b| {
        b.iter(|| tailbound::chernoff::chernoff_optimize(black_box(&mgf), 75.0).unwrap())
    });
}

criterion_group!(
    benches,
    bench_mc_tail,
    bench_efron_stein,
    bench_exact_tail,
    bench_chernoff_optimize
);
criterion_main!(benches);
