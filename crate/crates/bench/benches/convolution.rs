use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nichewave_bench::{fixture, test_vector};
use nichewave_core::Path;

fn convolution(c: &mut Criterion) {
    let mut group = c.benchmark_group("convolution");
    for n in [256usize, 1024, 4096] {
        let op = fixture(n, 2.0);
        let u = test_vector(op.len());
        for (name, path) in [("direct", Path::Direct), ("fft", Path::Fast)] {
            group.bench_with_input(BenchmarkId::new(name, n), &u, |b, u| {
                b.iter(|| op.convolver().convolve(u, path).expect("convolution"))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, convolution);
criterion_main!(benches);
