use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use crkit::refinement::{iterate_refinement, stable_partition};
use crkit::Partition;
use crkit_bench::sparse;

fn stable(c: &mut Criterion) {
    let mut group = c.benchmark_group("stable_partition");
    group.sample_size(10);
    for n in [10_000, 100_000, 200_000] {
        let g = sparse(n);
        group.throughput(Throughput::Elements((n + 2 * g.num_edges()) as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| stable_partition(black_box(g)))
        });
    }
    group.finish();
}

fn rounds(c: &mut Criterion) {
    let mut group = c.benchmark_group("round_based");
    group.sample_size(10);
    for n in [1_000, 10_000] {
        let g = sparse(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| iterate_refinement(g, &Partition::from_colors(g)))
        });
    }
    group.finish();
}

criterion_group!(benches, stable, rounds);
criterion_main!(benches);
