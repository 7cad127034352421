use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use illg::init::smooth_random_unit;
use illg::scheme::{cold_start, ColdStart, FieldSpec, IllgStepper, SchemeParams, TimeWindow};
use illg::{Execution, Grid, Vec3, VectorField};
use std::hint::black_box;

const MODES: [(&str, Execution); 2] = [("serial", Execution::Serial), ("parallel", Execution::Parallel)];

fn laplacian(c: &mut Criterion) {
    let mut group = c.benchmark_group("laplacian");
    for n in [16, 32, 64] {
        let g = Grid::unit_cube(n).unwrap();
        let m = smooth_random_unit(g, 1).with_ghosts_filled();
        let mut out = VectorField::zeros(g);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| m.laplacian_into(black_box(&mut out), exec))
            });
        }
    }
    group.finish();
}

fn illg_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("illg_step");
    group.sample_size(20);
    for n in [16, 32] {
        let g = Grid::unit_cube(n).unwrap();
        let h = g.min_spacing();
        let field = FieldSpec::Constant(Vec3::new(10.0, 0.0, 0.0));
        for (name, exec) in MODES {
            let params = SchemeParams::new(0.5, 1.0, h * h / 8.0)
                .unwrap()
                .with_execution(exec)
                .with_cfl_warning(false);
            let m0 = smooth_random_unit(g, 1);
            let levels = cold_start(&m0, field.at(0.0), &params, ColdStart::Taylor, None).unwrap();
            let window = TimeWindow::from_levels(levels, params.k).unwrap();
            let mut stepper = IllgStepper::new(g, params, field).unwrap();
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| stepper.step(black_box(&window), None).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, laplacian, illg_step);
criterion_main!(benches);
