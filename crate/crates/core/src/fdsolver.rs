//! Finite-difference solvers for the coupled open-loop equilibrium ODEs and
//! the periodic/trend decomposition of their solution.
//!
//! # Discretization
//!
//! All solvers share one stencil family on a uniform grid `t_j = j h`:
//! central second differences for inventories, forward first differences for
//! the rate couplings. The interior equations for the major inventory `z` and
//! the representative minor inventory `w` read
//!
//! ```text
//! a0 (z_{j+1} - 2 z_j + z_{j-1}) / h^2 - phi0 z_j
//!     + cM (w_{j+1} - w_j) / h                         = rhs_major_j,
//! a  (w_{j+1} - 2 w_j + w_{j-1}) / h^2 - phi  w_j
//!     + cMm (z_{j+1} - z_j) / h + cMs (w_{j+1} - w_j) / h = rhs_minor_j,
//! ```
//!
//! with couplings `(cM, cMm, cMs) = (lambda/2, lambda0/2, lambda/2)` for the
//! interacting game and `(0, 0, lambda/2)` for the interaction-free
//! benchmark (the minor always feels the aggregate of its own crowd). Grouping
//! unknowns as `u_j = (z_j, w_j)` yields a block-tridiagonal system solved by
//! 2x2 block elimination.
//!
//! # Periodic and trend components
//!
//! For a mean-zero residual target, the periodic component is the fixed point
//! of a relaxation: solve the same stencils over `n` tiled periods with equal
//! endpoint values `q`, then average `q` with the solution one period in.
//! The map is a contraction, and its fixed point satisfies the
//! wrapped-around periodic stencil exactly. The trend component solves the
//! homogeneous-major / constant-forced-minor system with boundary values that
//! splice the decomposition together, so that
//!
//! ```text
//! q_major(t) = q0_major (1 - t/T) + tiled periodic + trend
//! ```
//!
//! reproduces the full equilibrium to rounding error.
//!
//! # Matrix-exponential oracle
//!
//! [`periodic_oracle_matrix`] computes the periodic component independently
//! from the first-order form `X' = A X + B(t)`,
//! `X = (major, minor, rate_major, rate_minor)`, via
//! `X_0 = (I - e^{A p})^{-1} ∫_0^p e^{A (p-s)} B_s ds` with a dense 4x4
//! matrix exponential and composite-trapezoid quadrature. It shares no code
//! with the stencil solvers and serves as their convergence reference.

use crate::error::{Error, Result};
use crate::model::{Grid, GridFn, Inventories, MarketParams, TargetStrategy};
use crate::numeric::forward_rates;
use nalgebra::{Matrix4, Vector4};

/// Relative pivot threshold below which a 2x2 block is declared singular.
const PIVOT_EPS: f64 = 1e-14;

/// Relative slack when matching horizons and period lengths across grids.
const SPAN_EPS: f64 = 1e-9;

/// Tuning knobs for the iterative periodic solve and the quadrature oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Maximum number of relaxation sweeps for the periodic fixed point.
    pub max_iter: usize,
    /// Convergence tolerance on the endpoint-value updates (shares).
    pub tol: f64,
    /// Trapezoid panels used by the matrix-exponential oracle's forcing
    /// integral over one period.
    pub oracle_quadrature_steps: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { max_iter: 200, tol: 1e-10, oracle_quadrature_steps: 100_000 }
    }
}

impl SolveOptions {
    fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.oracle_quadrature_steps == 0 {
            return Err(Error::InvalidParameter(
                "oracle_quadrature_steps must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Rate-coupling coefficients `(cM, cMm, cMs)` of the stencils.
#[derive(Debug, Clone, Copy)]
struct Coupling {
    /// Minor rate entering the major's equation (`lambda / 2` when on).
    major_cross: f64,
    /// Major rate entering the minor's equation (`lambda0 / 2` when on).
    minor_cross: f64,
    /// Minor rate entering its own equation (`lambda / 2` always).
    minor_self: f64,
}

impl Coupling {
    fn interacting(p: &MarketParams) -> Self {
        Self {
            major_cross: 0.5 * p.lambda,
            minor_cross: 0.5 * p.lambda0,
            minor_self: 0.5 * p.lambda,
        }
    }

    fn interaction_free(p: &MarketParams) -> Self {
        Self { major_cross: 0.0, minor_cross: 0.0, minor_self: 0.5 * p.lambda }
    }
}

/// Dense 2x2 matrix in row-major order, the block unit of the elimination.
#[derive(Debug, Clone, Copy)]
struct Mat2 {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl Mat2 {
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    fn sub(self, o: Mat2) -> Mat2 {
        Mat2 { a: self.a - o.a, b: self.b - o.b, c: self.c - o.c, d: self.d - o.d }
    }

    fn apply(self, x: (f64, f64)) -> (f64, f64) {
        (self.a * x.0 + self.b * x.1, self.c * x.0 + self.d * x.1)
    }

    /// Inverse with a relative determinant guard.
    fn inverse(self) -> Option<Mat2> {
        let det = self.a * self.d - self.b * self.c;
        let norm = self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs());
        if norm == 0.0 || det.abs() <= PIVOT_EPS * norm * norm {
            return None;
        }
        Some(Mat2 { a: self.d / det, b: -self.b / det, c: -self.c / det, d: self.a / det })
    }
}

/// Solves the coupled two-point boundary-value stencils on `grid`.
///
/// `rhs_major`/`rhs_minor` are full node-length slices whose endpoint entries
/// are ignored; `z_bc`/`w_bc` pin the values at nodes `0` and `n_mesh`.
/// Returns full node vectors including the boundary values.
fn solve_pair_bvp(
    params: &MarketParams,
    coupling: Coupling,
    grid: &Grid,
    rhs_major: &[f64],
    rhs_minor: &[f64],
    z_bc: (f64, f64),
    w_bc: (f64, f64),
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = grid.n_mesh();
    let h = grid.step();
    let h2 = h * h;
    let sub = Mat2 { a: params.a0 / h2, b: 0.0, c: 0.0, d: params.a / h2 };
    let diag = Mat2 {
        a: -2.0 * params.a0 / h2 - params.phi0,
        b: -coupling.major_cross / h,
        c: -coupling.minor_cross / h,
        d: -2.0 * params.a / h2 - params.phi - coupling.minor_self / h,
    };
    let sup = Mat2 {
        a: params.a0 / h2,
        b: coupling.major_cross / h,
        c: coupling.minor_cross / h,
        d: params.a / h2 + coupling.minor_self / h,
    };

    // Interior right-hand sides with the boundary columns folded in.
    let mut d: Vec<(f64, f64)> = (1..n).map(|j| (rhs_major[j], rhs_minor[j])).collect();
    let first = sub.apply((z_bc.0, w_bc.0));
    d[0].0 -= first.0;
    d[0].1 -= first.1;
    let last = sup.apply((z_bc.1, w_bc.1));
    d[n - 2].0 -= last.0;
    d[n - 2].1 -= last.1;

    // Block-Thomas elimination: u_j + cp_j u_{j+1} = dp_j.
    let mut cp: Vec<Mat2> = Vec::with_capacity(n - 1);
    let mut dp: Vec<(f64, f64)> = Vec::with_capacity(n - 1);
    for j in 0..n - 1 {
        let (pivot, rhs) = if j == 0 {
            (diag, d[0])
        } else {
            let carried = sub.apply(dp[j - 1]);
            (diag.sub(sub.mul(cp[j - 1])), (d[j].0 - carried.0, d[j].1 - carried.1))
        };
        let inv = pivot.inverse().ok_or_else(|| {
            Error::SingularSystem(format!("block pivot at node {} is numerically singular", j + 1))
        })?;
        cp.push(inv.mul(sup));
        dp.push(inv.apply(rhs));
    }

    // Back substitution, then reattach the boundary values.
    let mut u = vec![(0.0, 0.0); n - 1];
    u[n - 2] = dp[n - 2];
    for j in (0..n - 2).rev() {
        let carried = cp[j].apply(u[j + 1]);
        u[j] = (dp[j].0 - carried.0, dp[j].1 - carried.1);
    }
    let mut z = Vec::with_capacity(n + 1);
    let mut w = Vec::with_capacity(n + 1);
    z.push(z_bc.0);
    w.push(w_bc.0);
    for &(zj, wj) in &u {
        z.push(zj);
        w.push(wj);
    }
    z.push(z_bc.1);
    w.push(w_bc.1);
    Ok((z, w))
}

/// Equilibrium (or benchmark) inventories and trading rates on a grid.
///
/// Rates are forward differences `v_j = (q_{j+1} - q_j) / h`, with the last
/// node carrying the final backward difference.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSolution {
    /// Major trader's inventory.
    pub major: GridFn,
    /// Representative minor trader's inventory.
    pub minor: GridFn,
    /// Major trader's trading rate.
    pub rate_major: GridFn,
    /// Representative minor trader's trading rate.
    pub rate_minor: GridFn,
}

fn package_solution(grid: &Grid, z: Vec<f64>, w: Vec<f64>) -> Result<EquilibriumSolution> {
    let h = grid.step();
    let rate_major = forward_rates(&z, h);
    let rate_minor = forward_rates(&w, h);
    Ok(EquilibriumSolution {
        major: GridFn::new(*grid, z)?,
        minor: GridFn::new(*grid, w)?,
        rate_major: GridFn::new(*grid, rate_major)?,
        rate_minor: GridFn::new(*grid, rate_minor)?,
    })
}

fn check_target_grid(target: &TargetStrategy, grid: &Grid) -> Result<()> {
    let t_end = grid.t_end();
    if (target.horizon() - t_end).abs() > SPAN_EPS * t_end.abs().max(1.0) {
        return Err(Error::GridMismatch(format!(
            "target horizon {} does not span the grid end {}",
            target.horizon(),
            t_end
        )));
    }
    // Piecewise targets jump at period boundaries; those must be grid nodes
    // for the sampled right-hand side to be well defined.
    if matches!(target, TargetStrategy::TwapStep { .. } | TargetStrategy::TwapResidual { .. }) {
        let n = target.n_periods().expect("step targets always carry a period count") as usize;
        if !grid.n_mesh().is_multiple_of(n) {
            return Err(Error::GridMismatch(format!(
                "{} grid cells cannot align with {} target jump times",
                grid.n_mesh(),
                n
            )));
        }
    }
    Ok(())
}

fn solve_full(
    params: &MarketParams,
    inv: &Inventories,
    target: &TargetStrategy,
    grid: &Grid,
    coupling: Coupling,
) -> Result<EquilibriumSolution> {
    check_target_grid(target, grid)?;
    let n = grid.num_nodes();
    let mut rhs_major = Vec::with_capacity(n);
    for j in 0..n {
        rhs_major.push(-params.phi0 * target.target_inventory(grid.node(j))?);
    }
    let rhs_minor = vec![0.0; n];
    let (z, w) = solve_pair_bvp(
        params,
        coupling,
        grid,
        &rhs_major,
        &rhs_minor,
        (inv.major, 0.0),
        (inv.minor, 0.0),
    )?;
    package_solution(grid, z, w)
}

/// Open-loop equilibrium inventories and rates on `grid`.
///
/// Solves the coupled discrete system with boundary values
/// `(q0_major, 0)` for the major and `(q0_minor, 0)` for the minor. The
/// caller is responsible for using parameters accepted by
/// [`crate::model::validate_params`]; the solver itself only fails on
/// numerically singular blocks.
pub fn solve_equilibrium(
    params: &MarketParams,
    inv: &Inventories,
    target: &TargetStrategy,
    grid: &Grid,
) -> Result<EquilibriumSolution> {
    solve_full(params, inv, target, grid, Coupling::interacting(params))
}

/// Interaction-free benchmark: each trader optimizes against a flat price,
/// with the cross-couplings removed (the minor keeps its own-crowd term).
pub fn solve_no_interaction(
    params: &MarketParams,
    inv: &Inventories,
    target: &TargetStrategy,
    grid: &Grid,
) -> Result<EquilibriumSolution> {
    solve_full(params, inv, target, grid, Coupling::interaction_free(params))
}

/// Periodic components of the equilibrium over one period `[0, T/n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSolution {
    /// Major periodic inventory component over one period.
    pub major: GridFn,
    /// Minor periodic inventory component over one period.
    pub minor: GridFn,
    /// Major periodic rate component (forward differences).
    pub rate_major: GridFn,
    /// Minor periodic rate component (forward differences).
    pub rate_minor: GridFn,
    /// Converged equal-endpoint values `(major, minor)` of the period.
    pub boundary: (f64, f64),
    /// Relaxation sweeps performed before convergence.
    pub iterations: usize,
}

fn check_residual_shape(residual: &TargetStrategy, n_periods: u32) -> Result<f64> {
    if n_periods == 0 {
        return Err(Error::InvalidParameter("period count must be at least 1".into()));
    }
    if residual.q0() != 0.0 {
        return Err(Error::NotPeriodic(format!(
            "residual must be mean-zero with q0 = 0, got q0 = {}",
            residual.q0()
        )));
    }
    if let Some(m) = residual.n_periods() {
        if m != n_periods {
            return Err(Error::InvalidParameter(format!(
                "period count {n_periods} does not match the residual's {m} periods"
            )));
        }
    }
    Ok(residual.horizon() / f64::from(n_periods))
}

fn periodic_with_coupling(
    params: &MarketParams,
    residual: &TargetStrategy,
    n_periods: u32,
    grid_per: &Grid,
    opts: &SolveOptions,
    coupling: Coupling,
) -> Result<PeriodicSolution> {
    opts.validate()?;
    let period = check_residual_shape(residual, n_periods)?;
    if (grid_per.t_end() - period).abs() > SPAN_EPS * period.abs().max(1.0) {
        return Err(Error::GridMismatch(format!(
            "period grid ends at {} but one period is {}",
            grid_per.t_end(),
            period
        )));
    }
    let cells_per = grid_per.n_mesh();
    let n = n_periods as usize;

    // The fixed point lives on the full horizon: tile the period n times so
    // the relaxation can read the solution one period in.
    let full = Grid::from_parts(residual.horizon(), cells_per * n)?;
    check_target_grid(residual, &full)?;
    let nodes = full.num_nodes();
    let mut rhs_major = Vec::with_capacity(nodes);
    for j in 0..nodes {
        rhs_major.push(-params.phi0 * residual.target_inventory(full.node(j))?);
    }
    let rhs_minor = vec![0.0; nodes];

    let solve_at = |q: (f64, f64)| -> Result<(Vec<f64>, Vec<f64>)> {
        solve_pair_bvp(params, coupling, &full, &rhs_major, &rhs_minor, (q.0, q.0), (q.1, q.1))
    };

    let mut q = (0.0, 0.0);
    let mut iterations = 0;
    let mut converged = false;
    let mut delta = f64::INFINITY;
    while iterations < opts.max_iter {
        iterations += 1;
        let (z, w) = solve_at(q)?;
        let inward = (z[cells_per], w[cells_per]);
        let next = (0.5 * (q.0 + inward.0), 0.5 * (q.1 + inward.1));
        delta = (next.0 - q.0).abs().max((next.1 - q.1).abs());
        q = next;
        if delta < opts.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { iterations, last_delta: delta });
    }

    // One final solve at the converged endpoint values, then keep the first
    // period only.
    let (z, w) = solve_at(q)?;
    let h = grid_per.step();
    let major: Vec<f64> = z[..=cells_per].to_vec();
    let minor: Vec<f64> = w[..=cells_per].to_vec();
    let rate_major = forward_rates(&major, h);
    let rate_minor = forward_rates(&minor, h);
    Ok(PeriodicSolution {
        major: GridFn::new(*grid_per, major)?,
        minor: GridFn::new(*grid_per, minor)?,
        rate_major: GridFn::new(*grid_per, rate_major)?,
        rate_minor: GridFn::new(*grid_per, rate_minor)?,
        boundary: q,
        iterations,
    })
}

/// Periodic components of the equilibrium for a mean-zero residual target.
///
/// Implements the endpoint relaxation: solve the full-horizon system with
/// equal endpoint values `q`, then average `q` with the solution one period
/// in; the map contracts to the unique discrete periodic solution. Fails with
/// [`Error::NonConvergence`] if the update still exceeds `opts.tol` after
/// `opts.max_iter` sweeps, and with [`Error::NotPeriodic`] if the residual is
/// not mean-zero.
pub fn solve_periodic(
    params: &MarketParams,
    residual: &TargetStrategy,
    n_periods: u32,
    grid_per: &Grid,
    opts: &SolveOptions,
) -> Result<PeriodicSolution> {
    periodic_with_coupling(
        params,
        residual,
        n_periods,
        grid_per,
        opts,
        Coupling::interacting(params),
    )
}

/// Periodic component of the interaction-free benchmark strategies.
///
/// Same relaxation as [`solve_periodic`] with the cross-couplings removed;
/// the minor's component is then identically zero up to the solve tolerance.
pub fn solve_periodic_no_interaction(
    params: &MarketParams,
    residual: &TargetStrategy,
    n_periods: u32,
    grid_per: &Grid,
    opts: &SolveOptions,
) -> Result<PeriodicSolution> {
    periodic_with_coupling(
        params,
        residual,
        n_periods,
        grid_per,
        opts,
        Coupling::interaction_free(params),
    )
}

/// Trend components of the equilibrium over the full horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendSolution {
    /// Major trend component.
    pub major: GridFn,
    /// Minor trend component.
    pub minor: GridFn,
}

/// Trend components completing the periodic-trend decomposition.
///
/// Solves the same stencils with zero major forcing, constant minor forcing
/// `lambda0 q0_major / (2T)`, and the splicing boundary values
/// `trend_major(0) = trend_major(T) = -q1`,
/// `trend_minor(0) = q0_minor - q2`, `trend_minor(T) = -q2`, where
/// `q0_per = (q1, q2)` are the periodic components' endpoint values from
/// [`solve_periodic`].
pub fn solve_trend(
    params: &MarketParams,
    inv: &Inventories,
    q0_per: (f64, f64),
    grid: &Grid,
) -> Result<TrendSolution> {
    let n = grid.num_nodes();
    let rhs_major = vec![0.0; n];
    let rhs_minor = vec![0.5 * params.lambda0 * inv.major / grid.t_end(); n];
    let (z, w) = solve_pair_bvp(
        params,
        Coupling::interacting(params),
        grid,
        &rhs_major,
        &rhs_minor,
        (-q0_per.0, -q0_per.0),
        (inv.minor - q0_per.1, -q0_per.1),
    )?;
    Ok(TrendSolution { major: GridFn::new(*grid, z)?, minor: GridFn::new(*grid, w)? })
}

/// Periodic-trend decomposition of the equilibrium on the full horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Major periodic component tiled across the full horizon.
    pub periodic_major: GridFn,
    /// Minor periodic component tiled across the full horizon.
    pub periodic_minor: GridFn,
    /// Major trend component.
    pub trend_major: GridFn,
    /// Minor trend component.
    pub trend_minor: GridFn,
}

/// Tiles the periodic components across the horizon and reassembles the full
/// equilibrium: `major = q0_major (1 - t/T) + periodic + trend`,
/// `minor = periodic + trend`.
///
/// Returns the tiled decomposition together with the reassembled solution
/// (rates by forward differences). Fails with [`Error::GridMismatch`] if the
/// period grid does not tile the trend grid in `n_periods` copies.
pub fn assemble_decomposition(
    periodic: &PeriodicSolution,
    trend: &TrendSolution,
    inv: &Inventories,
    n_periods: u32,
) -> Result<(Decomposition, EquilibriumSolution)> {
    if n_periods == 0 {
        return Err(Error::InvalidParameter("period count must be at least 1".into()));
    }
    let full = trend.major.grid();
    let per = periodic.major.grid();
    let n = n_periods as usize;
    let cells_per = per.n_mesh();
    if full.n_mesh() != cells_per * n {
        return Err(Error::GridMismatch(format!(
            "{} periods of {} cells cannot tile a grid of {} cells",
            n,
            cells_per,
            full.n_mesh()
        )));
    }
    let span = f64::from(n_periods) * per.t_end();
    if (span - full.t_end()).abs() > SPAN_EPS * full.t_end().abs().max(1.0) {
        return Err(Error::GridMismatch(format!(
            "{n_periods} periods of {} do not span the horizon {}",
            per.t_end(),
            full.t_end()
        )));
    }

    let nodes = full.num_nodes();
    let t_end = full.t_end();
    let per_major = periodic.major.values();
    let per_minor = periodic.minor.values();
    let trend_major = trend.major.values();
    let trend_minor = trend.minor.values();

    let mut tiled_major = Vec::with_capacity(nodes);
    let mut tiled_minor = Vec::with_capacity(nodes);
    let mut major = Vec::with_capacity(nodes);
    let mut minor = Vec::with_capacity(nodes);
    for j in 0..nodes {
        let pm = per_major[j % cells_per];
        let pw = per_minor[j % cells_per];
        tiled_major.push(pm);
        tiled_minor.push(pw);
        let ramp = inv.major * (1.0 - full.node(j) / t_end);
        major.push(ramp + (pm + trend_major[j]));
        minor.push(pw + trend_minor[j]);
    }

    let h = full.step();
    let rate_major = forward_rates(&major, h);
    let rate_minor = forward_rates(&minor, h);
    let decomposition = Decomposition {
        periodic_major: GridFn::new(full, tiled_major)?,
        periodic_minor: GridFn::new(full, tiled_minor)?,
        trend_major: trend.major.clone(),
        trend_minor: trend.minor.clone(),
    };
    let reassembled = EquilibriumSolution {
        major: GridFn::new(full, major)?,
        minor: GridFn::new(full, minor)?,
        rate_major: GridFn::new(full, rate_major)?,
        rate_minor: GridFn::new(full, rate_minor)?,
    };
    Ok((decomposition, reassembled))
}

/// First-order system matrix of the periodic ODEs for
/// `X = (major, minor, rate_major, rate_minor)`.
fn system_matrix(p: &MarketParams) -> Matrix4<f64> {
    Matrix4::new(
        0.0,
        0.0,
        1.0,
        0.0,
        0.0,
        0.0,
        0.0,
        1.0,
        p.phi0 / p.a0,
        0.0,
        0.0,
        -0.5 * p.lambda / p.a0,
        0.0,
        p.phi / p.a,
        -0.5 * p.lambda0 / p.a,
        -0.5 * p.lambda / p.a,
    )
}

/// Periodic components over one period, sampled by the matrix oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTrajectory {
    /// Major periodic inventory component.
    pub major: GridFn,
    /// Minor periodic inventory component.
    pub minor: GridFn,
    /// Major periodic rate component (exact state derivative, not a
    /// difference quotient).
    pub rate_major: GridFn,
    /// Minor periodic rate component (exact state derivative).
    pub rate_minor: GridFn,
}

/// Matrix-exponential representation of the periodic components.
#[derive(Debug, Clone)]
pub struct OraclePeriodic {
    /// Periodic initial state `(major, minor, rate_major, rate_minor)` at
    /// the start of a period.
    pub x0: [f64; 4],
    params: MarketParams,
    residual: TargetStrategy,
    period: f64,
    quadrature_steps: usize,
}

/// Smooth-branch forcing value of the residual at in-period time `s`.
fn forcing(params: &MarketParams, residual: &TargetStrategy, s: f64) -> Vector4<f64> {
    Vector4::new(0.0, 0.0, -params.phi0 / params.a0 * residual.residual_branch(s), 0.0)
}

/// Builds the matrix-exponential oracle for the periodic components.
///
/// Computes `X_0 = (I - e^{A p})^{-1} ∫_0^p e^{A (p - s)} B_s ds` with the
/// dense matrix exponential and a composite trapezoid rule over
/// `opts.oracle_quadrature_steps` panels, sampling the residual's smooth
/// branch (one-sided limits at period ends). Admissible residuals are the
/// mean-zero smooth targets and the sawtooth; anything else fails with
/// [`Error::NotPeriodic`].
pub fn periodic_oracle_matrix(
    params: &MarketParams,
    residual: &TargetStrategy,
    n_periods: u32,
    opts: &SolveOptions,
) -> Result<OraclePeriodic> {
    opts.validate()?;
    let period = check_residual_shape(residual, n_periods)?;
    match residual {
        TargetStrategy::DTwap { .. }
        | TargetStrategy::Cosine { .. }
        | TargetStrategy::TwapResidual { .. } => {}
        TargetStrategy::TwapStep { .. } | TargetStrategy::SampledRate { .. } => {
            return Err(Error::NotPeriodic(
                "oracle needs a residual with an explicit smooth branch".into(),
            ));
        }
    }

    let a_mat = system_matrix(params);
    let nq = opts.oracle_quadrature_steps;
    let hq = period / nq as f64;
    let step = (a_mat * hq).exp();

    // Walk e^{A (p - s)} from s = p downward while accumulating the
    // trapezoid sum of e^{A (p - s)} B_s.
    let mut weighted = Vector4::zeros();
    let mut transport = Matrix4::identity();
    for k in (0..=nq).rev() {
        let s = k as f64 * hq;
        let weight = if k == 0 || k == nq { 0.5 } else { 1.0 };
        weighted += transport * forcing(params, residual, s) * (weight * hq);
        if k > 0 {
            transport *= step;
        }
    }

    let monodromy = (a_mat * period).exp();
    let x0 = (Matrix4::identity() - monodromy)
        .lu()
        .solve(&weighted)
        .ok_or_else(|| Error::SingularMatrix("I - exp(A p) is numerically singular".into()))?;

    Ok(OraclePeriodic {
        x0: [x0[0], x0[1], x0[2], x0[3]],
        params: *params,
        residual: residual.clone(),
        period,
        quadrature_steps: nq,
    })
}

impl OraclePeriodic {
    /// Length of one period.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Samples the periodic state on `grid` (which must span one period) by
    /// stepping `X_{i+1} = e^{A h} X_i + ∫ e^{A (h - s)} B ds` cell by cell,
    /// with the local integrals resolved at the oracle's quadrature density.
    pub fn sample(&self, grid: &Grid) -> Result<OracleTrajectory> {
        if (grid.t_end() - self.period).abs() > SPAN_EPS * self.period.abs().max(1.0) {
            return Err(Error::GridMismatch(format!(
                "oracle period is {} but the grid ends at {}",
                self.period,
                grid.t_end()
            )));
        }
        let a_mat = system_matrix(&self.params);
        let h = grid.step();
        let m_sub = ((self.quadrature_steps as f64 * h / self.period).round()).max(1.0) as usize;
        let h_loc = h / m_sub as f64;
        let step_cell = (a_mat * h).exp();
        let step_loc = (a_mat * h_loc).exp();

        let nodes = grid.num_nodes();
        let mut major = Vec::with_capacity(nodes);
        let mut minor = Vec::with_capacity(nodes);
        let mut rate_major = Vec::with_capacity(nodes);
        let mut rate_minor = Vec::with_capacity(nodes);
        let mut x = Vector4::new(self.x0[0], self.x0[1], self.x0[2], self.x0[3]);
        for i in 0..nodes {
            major.push(x[0]);
            minor.push(x[1]);
            rate_major.push(x[2]);
            rate_minor.push(x[3]);
            if i + 1 == nodes {
                break;
            }
            let t_i = grid.node(i);
            let mut weighted = Vector4::zeros();
            let mut transport = Matrix4::identity();
            for k in (0..=m_sub).rev() {
                let s = t_i + k as f64 * h_loc;
                let weight = if k == 0 || k == m_sub { 0.5 } else { 1.0 };
                weighted += transport * forcing(&self.params, &self.residual, s) * (weight * h_loc);
                if k > 0 {
                    transport *= step_loc;
                }
            }
            x = step_cell * x + weighted;
        }
        Ok(OracleTrajectory {
            major: GridFn::new(*grid, major)?,
            minor: GridFn::new(*grid, minor)?,
            rate_major: GridFn::new(*grid, rate_major)?,
            rate_minor: GridFn::new(*grid, rate_minor)?,
        })
    }
}
