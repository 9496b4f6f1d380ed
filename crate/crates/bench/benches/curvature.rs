use std::hint::black_box;

use agcurv::{audit_batch, audit_theorems, BatchConfig, CoefficientTriple, CurvatureBundle, StructureData};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn build(c: &mut Criterion) {
    let mut g = c.benchmark_group("bundle_build");
    for n in [1, 2, 3] {
        let st = StructureData::random_admissible(n, 7, 0.5).unwrap();
        let coeffs = CoefficientTriple::new(1.0, -0.4, 0.2);
        g.bench_with_input(BenchmarkId::from_parameter(n), &st, |b, st| {
            b.iter(|| CurvatureBundle::build(black_box(st), coeffs, 1e-9).unwrap())
        });
    }
    g.finish();
}

fn audit(c: &mut Criterion) {
    let st = StructureData::random_admissible(2, 7, 0.5).unwrap();
    let coeffs = CoefficientTriple::new(1.0, -0.4, 0.2);
    c.bench_function("audit_theorems/n2", |b| b.iter(|| audit_theorems(black_box(&st), coeffs, 1e-9).unwrap()));
    let config = BatchConfig { n: 2, trials: 1, seed: 0, scale: 0.5, tolerance: 1e-9 };
    let mut g = c.benchmark_group("audit_batch");
    g.sample_size(10);
    g.bench_function("one_trial/n2", |b| b.iter(|| audit_batch(black_box(config)).unwrap()));
    g.finish();
}

criterion_group!(benches, build, audit);
criterion_main!(benches);
