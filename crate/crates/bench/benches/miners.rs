use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rootscan::mining::{mine, Algorithm, MiningParams};
use rootscan::pipeline::{analyze_prepared, prepare, AnalysisConfig, Prepared};
use rootscan::synth::{self, SynthConfig, LABEL_COLUMN, TARGET_VALUE};

const MIN_SUPPORT: f64 = 0.2;

fn analysis(aggregate: bool) -> AnalysisConfig {
    let mut cfg = AnalysisConfig::new(LABEL_COLUMN, TARGET_VALUE);
    cfg.mining.min_support = MIN_SUPPORT;
    cfg.aggregate = aggregate;
    cfg
}

fn planted(rows: usize, duplicates: usize) -> SynthConfig {
    SynthConfig {
        rows,
        planted_lengths: vec![5, 5],
        duplicates,
        ..SynthConfig::default()
    }
}

fn prepared(config: &SynthConfig, aggregate: bool) -> Prepared {
    let log = synth::generate(config).expect("valid synthetic config").log;
    prepare(log, &analysis(aggregate)).expect("synthetic log prepares")
}

fn miners(c: &mut Criterion) {
    let mut group = c.benchmark_group("mine");
    for rows in [10_000, 50_000] {
        let data = prepared(&planted(rows, 1), true);
        group.throughput(Throughput::Elements(data.dataset.group_count() as u64));
        for alg in [Algorithm::Apriori, Algorithm::FpGrowth] {
            let params = MiningParams {
                min_support: MIN_SUPPORT,
                max_length: 5,
                threads: 1,
            };
            group.bench_with_input(BenchmarkId::new(alg.to_string(), rows), &data, |b, d| {
                b.iter(|| mine(black_box(&d.dataset), &params, alg).unwrap())
            });
        }
    }
    group.finish();
}

fn apriori_threads(c: &mut Criterion) {
    let data = prepared(&planted(50_000, 1), true);
    let mut group = c.benchmark_group("apriori_threads");
    for threads in [1, 2, 4, 8] {
        let params = MiningParams {
            min_support: MIN_SUPPORT,
            max_length: 5,
            threads,
        };
        group.bench_with_input(BenchmarkId::from_parameter(threads), &params, |b, p| {
            b.iter(|| mine(black_box(&data.dataset), p, Algorithm::Apriori).unwrap())
        });
    }
    group.finish();
}

fn aggregation(c: &mut Criterion) {
    let config = planted(50_000, 100);
    let log = synth::generate(&config).unwrap().log;
    let mut group = c.benchmark_group("analyze_duplicated");
    group.sample_size(10);
    for aggregate in [true, false] {
        let cfg = analysis(aggregate);
        let name = if aggregate { "aggregated" } else { "per_row" };
        group.bench_function(name, |b| {
            b.iter_batched(
                || log.clone(),
                |log| {
                    let p = prepare(log, &cfg).unwrap();
                    analyze_prepared(&p, &cfg, None).unwrap()
                },
                criterion::BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, miners, apriori_threads, aggregation);
criterion_main!(benches);
