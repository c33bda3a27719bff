//! The cost story at step granularity: one adaptation-plus-forecast step of
//! the online model against one sliding-window retrain of the competitor.

use criterion::{criterion_group, criterion_main, Criterion};
use nsfts::drift::{generate, DriftKind, DriftSpec};
use nsfts::fts::{FtsModel, FtsParams};
use nsfts::nsfts::{NsftsModel, NsftsParams};

fn bench_step(c: &mut Criterion) {
    let series = generate(&DriftSpec::new(DriftKind::IncrementalMean, 2000, 7))
        .unwrap()
        .values;
    let mut group = c.benchmark_group("step");

    let params = NsftsParams::default();
    let mut model = NsftsModel::train(&series[..500], &params).unwrap();
    let mut t = 500;
    group.bench_function("nsfts_adapt_forecast", |b| {
        b.iter(|| {
            let f = model.step(series[t]).unwrap();
            t = if t + 1 < series.len() { t + 1 } else { 500 };
            f
        })
    });

    let fts_params = FtsParams::default();
    let mut start = 0;
    group.bench_function("time_variant_retrain", |b| {
        b.iter(|| {
            let window = &series[start..start + 100];
            start = if start + 101 < series.len() {
                start + 1
            } else {
                0
            };
            FtsModel::train(window, &fts_params).unwrap()
        })
    });

    group.finish();
}

criterion_group!(benches, bench_step);
criterion_main!(benches);
