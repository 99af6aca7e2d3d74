use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use warphopf::{
    classify, et_test, evaluate_identity, make_rn, radicand_identity, shape_field,
    ClassifyTolerances, IdentityId,
};
use warphopf_bench::Fixture;

fn shape_fields(c: &mut Criterion) {
    let fx = Fixture::dss();
    let mut group = c.benchmark_group("shape_field");
    group.sample_size(10);
    for n in [64, 128] {
        let grid = fx.off_center_sphere(n);
        group.bench_with_input(
            BenchmarkId::new("off_center_sphere", n),
            &grid,
            |b, grid| b.iter(|| shape_field(black_box(grid), &fx.ambient).unwrap()),
        );
    }
    group.finish();
}

fn checks(c: &mut Criterion) {
    let fx = Fixture::dss();
    let sphere = shape_field(&fx.off_center_sphere(128), &fx.ambient).unwrap();
    let perturbed = shape_field(&fx.perturbed_slice(128), &fx.ambient).unwrap();
    let mut group = c.benchmark_group("checks");
    for id in [IdentityId::I1, IdentityId::I3, IdentityId::I9] {
        group.bench_function(BenchmarkId::new("identity", id), |b| {
            b.iter(|| evaluate_identity(black_box(&sphere), &fx.ambient, &fx.model, id).unwrap())
        });
    }
    group.bench_function("et_test", |b| {
        b.iter(|| et_test(black_box(&perturbed), &fx.model, 4.0, 1e-12).unwrap())
    });
    group.bench_function("classify", |b| {
        b.iter(|| {
            classify(
                black_box(&perturbed),
                &fx.model,
                ClassifyTolerances::default(),
            )
            .unwrap()
        })
    });
    let rn = make_rn(2.0, 0.5).unwrap();
    group.bench_function("radicand_identity", |b| {
        b.iter(|| radicand_identity(black_box(&rn)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, shape_fields, checks);
criterion_main!(benches);
