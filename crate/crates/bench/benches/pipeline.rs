use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use diffguide_bench::{dataset, skewed_histogram};
use diffguide_core::transform::DEFAULT_LAMBDA;
use diffguide_core::{fit_thresholds, sample_distilled, SamplingConfig};

fn fit(c: &mut Criterion) {
    let mut group = c.benchmark_group("fit_thresholds");
    for bins in [10, 20, 40] {
        let h = skewed_histogram(bins);
        let eps = 1e-6 * h.total();
        group.bench_with_input(BenchmarkId::from_parameter(bins), &h, |b, h| {
            b.iter(|| fit_thresholds(black_box(h), DEFAULT_LAMBDA, eps).unwrap())
        });
    }
    group.finish();
}

fn sample(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_distilled");
    group.sample_size(20);
    for ipc in [10, 50] {
        let data = dataset(10, ipc, 0);
        let config = SamplingConfig {
            ipc,
            ..SamplingConfig::default()
        };
        group.bench_function(BenchmarkId::from_parameter(ipc), |b| {
            b.iter(|| sample_distilled(black_box(&data.original), black_box(&data.pool), &config).unwrap())
        });
    }
    group.finish();
}

fn generate(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate_synthetic");
    group.sample_size(10);
    group.bench_function("10 classes", |b| b.iter(|| dataset(10, 10, black_box(1))));
    group.finish();
}

criterion_group!(benches, fit, sample, generate);
criterion_main!(benches);
