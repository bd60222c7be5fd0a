use criterion::{criterion_group, criterion_main, Criterion};
use gasgiant_core::pestov::{compact_test_field, FlowDifferencer, PhaseGrid};
use gasgiant_core::transform::ConstantForm;
use gasgiant_core::{flow, rng, transform, IntegratorOptions, MetricModel, PhaseState};
use std::hint::black_box;

fn rays(model: &MetricModel) -> Vec<PhaseState> {
    let mut r = rng::stream(1, 0);
    (0..16).map(|_| rng::boundary_ray(&mut r, model)).collect()
}

fn bench_trace(c: &mut Criterion) {
    let opts = IntegratorOptions::default();
    for model in MetricModel::builtins() {
        let ics = rays(&model);
        c.bench_function(&format!("trace_16_rays_{}", model.name()), |b| {
            b.iter(|| {
                for ic in &ics {
                    black_box(flow::trace(&model, ic, &opts).unwrap());
                }
            })
        });
    }
}

fn bench_xray(c: &mut Criterion) {
    let opts = IntegratorOptions::default();
    let model = MetricModel::perturbed();
    let ics = rays(&model);
    let f = ConstantForm([0.3, 1.0, 0.0]);
    c.bench_function("xray_16_rays_perturbed", |b| {
        b.iter(|| {
            for ic in &ics {
                black_box(transform::xray(&model, &f, ic, &opts).unwrap());
            }
        })
    });
}

fn bench_pestov(c: &mut Criterion) {
    let model = MetricModel::perturbed();
    let grid = PhaseGrid::new(&model, 0.2, 1.0, 32, 32, 32).unwrap();
    let u = compact_test_field(&grid);
    let mut g = c.benchmark_group("pestov_32");
    g.sample_size(10);
    g.bench_function("flow_differencer_new", |b| b.iter(|| black_box(FlowDifferencer::new(&grid))));
    let xd = FlowDifferencer::new(&grid);
    g.bench_function("flow_differencer_apply", |b| b.iter(|| black_box(xd.apply(&grid, &u))));
    g.finish();
}

criterion_group!(benches, bench_trace, bench_xray, bench_pestov);
criterion_main!(benches);
