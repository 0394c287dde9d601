use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nichewave_bench::fixture;
use nichewave_core::{principal_eigenvalue, rayleigh_lambda_v, SpectralOptions};

fn eigenvalue(c: &mut Criterion) {
    let opts = SpectralOptions::default();
    let mut group = c.benchmark_group("principal_eigenvalue");
    for n in [256usize, 1024, 4096] {
        let op = fixture(n, 1.0);
        group.bench_with_input(BenchmarkId::new("perron", n), &op, |b, op| {
            b.iter(|| principal_eigenvalue(op, &opts).expect("eigenvalue"))
        });
        group.bench_with_input(BenchmarkId::new("rayleigh", n), &op, |b, op| {
            b.iter(|| rayleigh_lambda_v(op, &opts).expect("eigenvalue"))
        });
    }
    group.finish();
}

criterion_group!(benches, eigenvalue);
criterion_main!(benches);
