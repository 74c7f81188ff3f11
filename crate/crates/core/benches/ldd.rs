use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ldd_core::ldd::{Engine, ExecutionMode};
use ldd_core::verify::preset;

fn time_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("time_step");
    group.sample_size(10);
    for (name, resolution) in [("fig3-homogeneous", 20), ("fig8-fivedomain", 24)] {
        let mut s = preset(name).unwrap();
        s.resolution = resolution;
        for (label, mode) in [
            ("sequential", ExecutionMode::Sequential),
            ("parallel", ExecutionMode::Parallel { threads: 0 }),
        ] {
            let engine = Engine::new(s.clone(), mode).unwrap();
            let start = engine.exact_fields(0.0);
            group.bench_with_input(BenchmarkId::new(label, name), &engine, |b, e| {
                b.iter(|| {
                    let mut state = e.init_time_step(&start, 1).unwrap();
                    e.run_time_step(&mut state).unwrap()
                })
            });
        }
    }
    group.finish();
}

fn single_iteration(c: &mut Criterion) {
    let mut group = c.benchmark_group("ldd_iteration");
    let mut s = preset("fig8-fivedomain").unwrap();
    s.resolution = 40;
    for (label, mode) in [
        ("sequential", ExecutionMode::Sequential),
        ("parallel", ExecutionMode::Parallel { threads: 0 }),
    ] {
        let engine = Engine::new(s.clone(), mode).unwrap();
        let state = engine.init_time_step(&engine.exact_fields(0.0), 1).unwrap();
        group.bench_function(label, |b| {
            b.iter_batched(
                || state.clone(),
                |mut st| engine.ldd_iteration(&mut st).unwrap(),
                criterion::BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, time_step, single_iteration);
criterion_main!(benches);
