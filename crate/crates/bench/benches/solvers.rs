//! Benchmarks of the solver and analysis kernels across grid resolutions:
//! the direct equilibrium solve, the periodic fixed point, the
//! matrix-exponential oracle, and the spectral estimator. Grid steps bracket
//! the resolution the bundled experiments run at (`h = 1e-3`).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use liqgame_core::analysis::{price_path, spectral_amplitudes, DEFAULT_DETREND_DEGREE};
use liqgame_core::presets;
use liqgame_core::{periodic_oracle_matrix, solve_equilibrium, solve_periodic, Grid, SolveOptions};

fn equilibrium_solve(c: &mut Criterion) {
    let preset = presets::cosine();
    let mut group = c.benchmark_group("solve_equilibrium");
    for h in [1e-2, 1e-3, 5e-4] {
        let grid = Grid::with_step(preset.params.horizon, h).expect("valid grid");
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("h={h:.0e}")),
            &grid,
            |b, grid| {
                b.iter(|| {
                    solve_equilibrium(&preset.params, &preset.inventories, &preset.target, grid)
                        .expect("preset solves")
                })
            },
        );
    }
    group.finish();
}

fn periodic_fixed_point(c: &mut Criterion) {
    let preset = presets::cosine();
    let residual = preset.target.periodic_residual().expect("cosine residual");
    let n_periods = preset.n_periods.expect("cosine preset is periodic");
    let period = preset.params.horizon / f64::from(n_periods);
    let opts = SolveOptions::default();
    let mut group = c.benchmark_group("solve_periodic");
    for h in [1e-2, 1e-3, 5e-4] {
        let grid = Grid::with_step(period, h).expect("valid period grid");
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("h={h:.0e}")),
            &grid,
            |b, grid| {
                b.iter(|| {
                    solve_periodic(&preset.params, &residual, n_periods, grid, &opts)
                        .expect("preset periodic component solves")
                })
            },
        );
    }
    group.finish();
}

fn oracle_matrix(c: &mut Criterion) {
    let preset = presets::cosine();
    let residual = preset.target.periodic_residual().expect("cosine residual");
    let n_periods = preset.n_periods.expect("cosine preset is periodic");
    let mut group = c.benchmark_group("periodic_oracle_matrix");
    // The forcing integral dominates; scale the panel count, not the model.
    group.sample_size(10);
    for steps in [10_000usize, 100_000] {
        let opts = SolveOptions { oracle_quadrature_steps: steps, ..SolveOptions::default() };
        group.bench_with_input(BenchmarkId::from_parameter(steps), &opts, |b, opts| {
            b.iter(|| {
                periodic_oracle_matrix(&preset.params, &residual, n_periods, opts)
                    .expect("oracle builds")
            })
        });
    }
    group.finish();
}

fn spectral_estimator(c: &mut Criterion) {
    let preset = presets::vwap();
    let grid = preset.default_grid();
    let sol = solve_equilibrium(&preset.params, &preset.inventories, &preset.target, &grid)
        .expect("preset solves");
    let series = price_path(&sol, &preset.params);
    c.bench_function("spectral_amplitudes/kmax=50", |b| {
        b.iter(|| spectral_amplitudes(&series, 50, DEFAULT_DETREND_DEGREE).expect("estimates"))
    });
}

criterion_group!(
    benches,
    equilibrium_solve,
    periodic_fixed_point,
    oracle_matrix,
    spectral_estimator
);
criterion_main!(benches);
