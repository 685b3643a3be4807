use arsp::eclipse::{eclipse_naive, eclipse_pruned};
use arsp_bench::{certain_points, default_box};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn eclipse(c: &mut Criterion) {
    let mut group = c.benchmark_group("eclipse_d3");
    group.sample_size(10);
    let rb = default_box(3);
    for log_n in [12u32, 14] {
        let n = 1usize << log_n;
        let points = certain_points(n, 3, 3);
        group.bench_with_input(BenchmarkId::new("naive", n), &n, |b, _| b.iter(|| eclipse_naive(&points, &rb)));
        group.bench_with_input(BenchmarkId::new("pruned", n), &n, |b, _| b.iter(|| eclipse_pruned(&points, &rb)));
    }
    group.finish();
}

criterion_group!(benches, eclipse);
criterion_main!(benches);
