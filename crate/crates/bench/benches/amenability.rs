use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use crkit::amenability::{check_cdef, is_amenable};
use crkit_bench::{sparse, tree};

fn recognizers(c: &mut Criterion) {
    let mut group = c.benchmark_group("amenability");
    group.sample_size(20);
    for n in [100, 1_000, 10_000] {
        let t = tree(n);
        group.bench_with_input(BenchmarkId::new("tree", n), &t, |b, g| {
            b.iter(|| is_amenable(black_box(g)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("tree_cdef", n), &t, |b, g| {
            b.iter(|| check_cdef(black_box(g)).unwrap())
        });
        let r = sparse(n);
        group.bench_with_input(BenchmarkId::new("random", n), &r, |b, g| {
            b.iter(|| is_amenable(black_box(g)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, recognizers);
criterion_main!(benches);
