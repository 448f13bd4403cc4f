use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fastcur::kernels::{qr_cp, svd};
use fastcur::maxvol;
use fastcur::selection::default_max_iters;
use fastcur_bench::gaussian;
use std::hint::black_box;

fn kernels(c: &mut Criterion) {
    let mut g = c.benchmark_group("kernels");
    for n in [32, 64, 128] {
        let a = gaussian(n, n);
        g.bench_with_input(BenchmarkId::new("qr_cp", n), &a, |b, a| {
            b.iter(|| qr_cp(black_box(a)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("svd", n), &a, |b, a| {
            b.iter(|| svd(black_box(a)).unwrap())
        });
    }
    for r in [5, 10, 20] {
        let a = gaussian(500, r);
        g.bench_with_input(BenchmarkId::new("maxvol_500", r), &a, |b, a| {
            b.iter(|| maxvol(black_box(a), 0.01, default_max_iters(r)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
