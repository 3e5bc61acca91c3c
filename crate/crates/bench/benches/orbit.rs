use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fleas::{obstruction, search, SearchOptions};

fn bench_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    for (name, t) in fleas_bench::fixtures() {
        for bound in [1000u64, 4000] {
            group.bench_with_input(BenchmarkId::new(name, bound), &bound, |b, &bound| {
                b.iter(|| search(&t, bound, &SearchOptions::default()).unwrap())
            });
        }
    }
    let opts = SearchOptions { workers: 4, ..Default::default() };
    group.bench_function("H/8000/4-workers", |b| {
        b.iter(|| search(&fleas::fixtures::h(), 8000, &opts).unwrap())
    });
    group.finish();
}

fn bench_residues(c: &mut Criterion) {
    c.bench_function("is_qr/999983", |b| {
        b.iter(|| obstruction::is_qr(3, 999_983).unwrap())
    });
    c.bench_function("jacobi/large", |b| {
        b.iter(|| obstruction::jacobi(123_456_789, 1_000_000_007).unwrap())
    });
}

criterion_group!(benches, bench_search, bench_residues);
criterion_main!(benches);
