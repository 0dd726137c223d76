use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use gridfr::harness::ExperimentConfig;
use gridfr::numerics::BandSpec;
use gridfr::raster::jittered_grid;
use gridfr::recon::{build_omega, build_psi, coefficients, default_grid_size, synthesize, Method, ModeBox, PlanOptions, ReconPlan};
use gridfr::sampling::{analytic_coeffs, Scene};
use gridfr::WindowSpec;

fn operators(c: &mut Criterion) {
    let mut group = c.benchmark_group("operators_1d");
    let window = WindowSpec::new(0.125, 1e-12, 1).unwrap();
    for n in [16usize, 64] {
        let raster = jittered_grid(&[n], 0.25, 1).unwrap();
        let modes = ModeBox::symmetric(&[n]).unwrap();
        group.bench_with_input(BenchmarkId::new("omega", n), &n, |b, _| {
            b.iter(|| build_omega(black_box(&raster), &window, &modes).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("psi", n), &n, |b, _| {
            b.iter(|| build_psi(black_box(&raster), &window, &modes, None).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("ftcg_plan", n), &n, |b, _| {
            b.iter(|| {
                ReconPlan::build(
                    &raster,
                    &window,
                    &modes,
                    &[Method::Ftcg],
                    Some(BandSpec::log_heuristic(n)),
                    PlanOptions::default(),
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

// per-data cost once a plan exists: the point of FTCG is a banded C at CG-like cost
fn apply(c: &mut Criterion) {
    let config = ExperimentConfig::preset("asterisk").unwrap();
    let (resolved, raster) = config.resolve().unwrap();
    let window = resolved.window_spec(2).unwrap();
    let modes = resolved.mode_box().unwrap();
    let band = BandSpec::new(resolved.band.unwrap()).unwrap();
    let plan = ReconPlan::build(&raster, &window, &modes, &Method::ALL, Some(band), PlanOptions::default()).unwrap();
    let samples = analytic_coeffs(&Scene::PaperTestFn, &raster).unwrap();
    let grid = default_grid_size(&modes);

    let mut group = c.benchmark_group("apply_asterisk");
    for m in Method::ALL {
        group.bench_function(m.as_str(), |b| b.iter(|| coefficients(&plan, m, black_box(&samples)).unwrap()));
    }
    let coeffs = coefficients(&plan, Method::Ftcg, &samples).unwrap();
    group.bench_function("synthesize", |b| b.iter(|| synthesize(black_box(&coeffs), &plan, grid).unwrap()));
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = operators, apply
}
criterion_main!(benches);
