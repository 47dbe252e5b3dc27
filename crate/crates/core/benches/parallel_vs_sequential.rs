use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cmpairs::exec::Execution;
use cmpairs::lax::spectral::{default_ladder, ScanSource, SpectralScan};
use cmpairs::pair_manifold::study::{stickiness_report, StickinessOptions};
use cmpairs::pair_manifold::ReducedState;
use cmpairs::{Complex64, Lattice};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn state() -> ReducedState {
    ReducedState::new(
        vec![c(0.1, 0.05), c(0.7, 0.45), c(-0.45, 0.5)],
        vec![c(0.2, 0.1), c(-0.1, 0.05), c(0.05, -0.15)],
    )
    .unwrap()
}

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn spectral_scan(cr: &mut Criterion) {
    let lat = Lattice::lemniscatic();
    let r = state();
    let z_grid: Vec<Complex64> = (0..16).map(|k| c(-1.5 + 0.2 * k as f64, 0.3)).collect();
    let lambda_grid = vec![c(0.3, 0.4), c(-0.2, 0.6)];
    let source = ScanSource::Limit { ladder: default_ladder() };
    let mut g = cr.benchmark_group("spectral_limit_scan");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| SpectralScan::compute(&lat, &r, black_box(&z_grid), &lambda_grid, source.clone(), exec).unwrap())
        });
    }
    g.finish();
}

fn stickiness_ladder(cr: &mut Criterion) {
    let lat = Lattice::lemniscatic();
    let r = state();
    let opts = StickinessOptions {
        t_end: 0.02,
        ..StickinessOptions::default()
    };
    let mut g = cr.benchmark_group("stickiness_ladder");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| stickiness_report(&lat, black_box(&r), &opts, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, spectral_scan, stickiness_ladder);
criterion_main!(benches);
