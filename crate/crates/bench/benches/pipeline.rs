use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use finsler_core::chart_metric::random_samples;
use finsler_core::curvature_engine::compute_curvature;
use finsler_core::fixtures;
use finsler_core::jet_calculus::{FdConfig, JetSpace, Scalar};
use finsler_core::tensor_lab::compute_bundle;

fn jet_mul(c: &mut Criterion) {
    let mut group = c.benchmark_group("jet_mul");
    for (nvars, order) in [(3, 2), (3, 4), (6, 3)] {
        let space = JetSpace::new(nvars, order);
        let a = space.variable(0, 0.3).mul(&space.variable(1, -0.7)).add_const(1.5);
        let b = space.variable(nvars - 1, 2.0).mul(&space.variable(0, 0.3)).add_const(0.25);
        group.bench_with_input(BenchmarkId::from_parameter(format!("n{nvars}_k{order}")), &(), |bench, _| {
            bench.iter(|| black_box(&a).mul(black_box(&b)))
        });
    }
    group.finish();
}

fn tensors(c: &mut Criterion) {
    let mut group = c.benchmark_group("compute_bundle");
    for spec in [fixtures::randers_var(3), fixtures::sphere(3, 1.0), fixtures::kropina(3)] {
        let samples = random_samples(&spec, 16, 1);
        group.bench_function(spec.name.clone(), |bench| {
            bench.iter(|| {
                for s in &samples {
                    black_box(compute_bundle(&spec, s).unwrap());
                }
            })
        });
    }
    group.finish();
}

fn curvature(c: &mut Criterion) {
    let mut group = c.benchmark_group("compute_curvature");
    group.sample_size(10);
    let fd = FdConfig::default();
    for spec in [fixtures::randers_var(3), fixtures::sphere(3, 1.0)] {
        let sample = random_samples(&spec, 1, 2).remove(0);
        group.bench_function(spec.name.clone(), |bench| {
            bench.iter(|| black_box(compute_curvature(&spec, &sample, &fd).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, jet_mul, tensors, curvature);
criterion_main!(benches);
