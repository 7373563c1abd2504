//! Parallel against sequential batch evaluation.
//!
//! `cargo bench -p qoc-core --bench batch`; with `--no-default-features`
//! both variants run sequentially.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qoc_core::batch::{costate_oracle_gaps, gradient_check, impulse_sweep, optimize_many, Execution};
use qoc_core::protocol::{constant_guess, impulse_protocol};
use qoc_core::{AdmissibilityTarget, ControlProtocol, CostFunctional, DescentConfig, TimeGrid};

const MODES: [(&str, Execution); 2] =
    [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

/// Admissible starting points: the constant guess and a family of ramps.
fn starts(target: &AdmissibilityTarget, grid: TimeGrid, count: usize) -> Vec<ControlProtocol> {
    (0..count)
        .map(|i| {
            let slope = 0.4 * i as f64 / count as f64;
            let c = constant_guess(target, grid);
            let tau = grid.tau();
            let shape: Vec<f64> = grid.times().iter().map(|t| 1.0 + slope * (t / tau - 0.5)).collect();
            let gamma = c.gamma().iter().zip(&shape).map(|(g, s)| g * s).collect();
            c.with_gamma(gamma).unwrap()
        })
        .collect()
}

fn bench_optimize_many(c: &mut Criterion) {
    let target = AdmissibilityTarget::default();
    let grid = TimeGrid::new(1.0, 1000).unwrap();
    let initials = starts(&target, grid, 8);
    let config = DescentConfig::new(0.1, 1e-5, 200).unwrap();
    let mut group = c.benchmark_group("optimize_many");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new("heating", name), |b| {
            b.iter(|| optimize_many(&CostFunctional::Heating, black_box(&initials), &target, &config, exec))
        });
    }
    group.finish();
}

fn bench_gradient_check(c: &mut Criterion) {
    let target = AdmissibilityTarget::default();
    let grid = TimeGrid::new(1.0, 2000).unwrap();
    let protocol = impulse_protocol(&target, grid, 0.5).unwrap();
    let nodes: Vec<usize> = (1..2000).step_by(50).collect();
    let mut group = c.benchmark_group("gradient_check");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new("dispersion", name), |b| {
            b.iter(|| {
                gradient_check(&CostFunctional::Dispersion, black_box(&protocol), 1.0, &nodes, 1e-6, exec)
                    .unwrap()
            })
        });
    }
    group.finish();
}

fn bench_sweeps(c: &mut Criterion) {
    let target = AdmissibilityTarget::default();
    let grid = TimeGrid::new(1.0, 20_000).unwrap();
    let widths: Vec<f64> = (1..=32).map(|k| k as f64 / 32.0).collect();
    let protocols = starts(&target, grid, 16);
    let mut group = c.benchmark_group("sweeps");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new("impulse_sweep", name), |b| {
            b.iter(|| impulse_sweep(&target, grid, black_box(&widths), exec).unwrap())
        });
        group.bench_function(BenchmarkId::new("costate_oracle", name), |b| {
            b.iter(|| costate_oracle_gaps(black_box(&protocols), 1.0, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_optimize_many, bench_gradient_check, bench_sweeps);
criterion_main!(benches);
