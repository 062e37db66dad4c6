use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use crkit::fractional::{compact_probe, is_fractionally_isomorphic};
use crkit_bench::{cycle_pair, two_cycles, SEED};

fn feasibility(c: &mut Criterion) {
    let mut group = c.benchmark_group("fractiso");
    group.sample_size(10);
    for n in [8, 12, 16] {
        let pair = cycle_pair(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &pair, |b, (g, h)| {
            b.iter(|| assert!(is_fractionally_isomorphic(g, h)))
        });
    }
    group.finish();
}

fn vertices(c: &mut Criterion) {
    let mut group = c.benchmark_group("compact_probe");
    group.sample_size(10);
    for k in [4, 6] {
        let g = two_cycles(k);
        group.bench_with_input(BenchmarkId::from_parameter(k + 3), &g, |b, g| {
            b.iter(|| compact_probe(g, 5, SEED))
        });
    }
    group.finish();
}

criterion_group!(benches, feasibility, vertices);
criterion_main!(benches);
