use criterion::{criterion_group, criterion_main, Criterion};
use fleas::algebra::{count_normal_forms, free_check};
use fleas::{normalize, simulate};

fn bench_algebra(c: &mut Criterion) {
    let word = fleas_bench::sample_word(12);
    c.bench_function("normalize/12", |b| b.iter(|| normalize(&word)));
    c.bench_function("free_check/5", |b| b.iter(|| free_check(5).unwrap()));
    c.bench_function("count_normal_forms/4", |b| b.iter(|| count_normal_forms(4).unwrap()));
    let t = fleas::fixtures::g();
    c.bench_function("simulate/12", |b| b.iter(|| simulate(&t, &word).unwrap()));
}

criterion_group!(benches, bench_algebra);
criterion_main!(benches);
