//! Finite-player approximation checker: how suboptimal are the mean-field
//! strategies when the crowd of minor traders is finite?
//!
//! With `N` identical minor traders, the average rate seen by each player is
//! `v̄ = (1/N) v^own + ((N-1)/N) v^Mn`, so playing the mean-field strategy is
//! only approximately optimal. This module computes
//!
//! * the theoretical suboptimality bounds
//!   `bound_major = 2 lambda T kappa / sqrt(N)` and
//!   `bound_minor = (2T/N) sqrt(K ((N+1) kappa + 2K))`, with
//!   `kappa = max(∫(v^Mj)^2, ∫(v^Mn)^2)` and `K = ∫(v^Mn)^2`, and
//! * the empirical gaps `eps = J(mean-field) - J(best response)`, where the
//!   best response against mean-field opponents is found by minimizing the
//!   discretized cost exactly.
//!
//! The discrete objective is the variational form whose stationarity
//! equations coincide with the equilibrium solver's stencils: inventories are
//! the decision variables (the liquidation constraint is absorbed by the
//! boundary values), rates are forward differences, and the quadratic is
//! minimized through its tridiagonal normal equations. Because the objective
//! is an exact quadratic, each gap is evaluated as
//! `eps = (d^T H d) / 2` with `d` the inventory difference and `H` the
//! (positive-definite) Hessian — nonnegative by construction and immune to
//! cancellation.

use crate::error::{Error, Result};
use crate::fdsolver::EquilibriumSolution;
use crate::model::{Grid, Inventories, MarketParams, TargetStrategy};
use crate::numeric::{solve_tridiagonal, trapezoid};

/// Relative slack when matching a target horizon to a solution grid.
const SPAN_EPS: f64 = 1e-9;

/// Suboptimality of the mean-field strategies in the `N`-player game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    /// Number of minor traders.
    pub n_players: usize,
    /// Rate energy bound `max(∫(v^Mj)^2 dt, ∫(v^Mn)^2 dt)` (shares²/time).
    pub kappa: f64,
    /// Minor rate energy `∫(v^Mn)^2 dt` (shares²/time).
    pub k_val: f64,
    /// Theoretical major suboptimality bound (currency).
    pub bound_major: f64,
    /// Theoretical minor suboptimality bound (currency).
    pub bound_minor: f64,
    /// Empirical major suboptimality (currency).
    pub eps_major: f64,
    /// Empirical minor suboptimality (currency).
    pub eps_minor: f64,
}

/// Rate energy constants of the mean-field solution:
/// `(kappa, k_val) = (max of both rate energies, minor rate energy)`.
pub fn mf_constants(sol: &EquilibriumSolution) -> (f64, f64) {
    let h = sol.major.grid().step();
    let major: Vec<f64> = sol.rate_major.values().iter().map(|v| v * v).collect();
    let minor: Vec<f64> = sol.rate_minor.values().iter().map(|v| v * v).collect();
    let energy_major = trapezoid(&major, h);
    let energy_minor = trapezoid(&minor, h);
    (energy_major.max(energy_minor), energy_minor)
}

/// Closed-form suboptimality bounds `(bound_major, bound_minor)` for `N`
/// minor traders.
pub fn theoretical_bounds(
    kappa: f64,
    k_val: f64,
    n_players: usize,
    params: &MarketParams,
) -> (f64, f64) {
    let n = n_players as f64;
    let t = params.horizon;
    let bound_major = params.lambda * 2.0 * t * kappa / n.sqrt();
    let bound_minor = 2.0 * t / n * (k_val * ((n + 1.0) * kappa + 2.0 * k_val)).sqrt();
    (bound_major, bound_minor)
}

/// Interior best response of the major against the mean-field minor rate
/// `mu`, as inventory values at nodes `1..n_mesh`.
fn major_best_response(
    params: &MarketParams,
    r: &[f64],
    mu: &[f64],
    bc: (f64, f64),
    h: f64,
) -> Result<Vec<f64>> {
    let interior = r.len() - 2;
    let diag = vec![4.0 * params.a0 / h + 2.0 * params.phi0 * h; interior];
    let off = vec![-2.0 * params.a0 / h; interior - 1];
    let mut rhs: Vec<f64> =
        (1..=interior).map(|j| 2.0 * params.phi0 * h * r[j] + params.lambda * h * mu[j]).collect();
    rhs[0] += 2.0 * params.a0 / h * bc.0;
    rhs[interior - 1] += 2.0 * params.a0 / h * bc.1;
    solve_tridiagonal(&off, &diag, &off, &rhs)
        .ok_or_else(|| Error::SingularKkt("major best-response system is singular".into()))
}

/// Interior best response of one minor trader holding the major at rate
/// `zeta` and the other minors at rate `mu`, with the crowd entering at
/// weight `crowd_weight` (`lambda (N-1)/N`) and the trader's own rate
/// feeding back into the average at `own_weight` (`lambda / N`).
fn minor_best_response(
    params: &MarketParams,
    zeta: &[f64],
    mu: &[f64],
    crowd_weight: f64,
    own_weight: f64,
    bc: (f64, f64),
    h: f64,
) -> Result<Vec<f64>> {
    let interior = zeta.len() - 2;
    let diag = vec![4.0 * params.a / h + 2.0 * params.phi * h + 2.0 * own_weight; interior];
    let off = vec![-2.0 * params.a / h - own_weight; interior - 1];
    let mut rhs: Vec<f64> =
        (1..=interior).map(|j| h * (params.lambda0 * zeta[j] + crowd_weight * mu[j])).collect();
    rhs[0] += 2.0 * params.a / h * bc.0;
    rhs[interior - 1] += (2.0 * params.a / h + own_weight) * bc.1;
    solve_tridiagonal(&off, &diag, &off, &rhs)
        .ok_or_else(|| Error::SingularKkt("minor best-response system is singular".into()))
}

/// Exact quadratic gap `(d^T H d) / 2` for a tridiagonal Hessian with
/// constant diagonal/off-diagonal and zero boundary differences.
fn quadratic_gap(d: &[f64], diag: f64, off: f64) -> f64 {
    let n = d.len();
    let mut total = 0.0;
    for j in 0..n {
        let left = if j > 0 { d[j - 1] } else { 0.0 };
        let right = if j + 1 < n { d[j + 1] } else { 0.0 };
        total += d[j] * (diag * d[j] + off * (left + right));
    }
    (0.5 * total).max(0.0)
}

/// Empirical and theoretical suboptimality of the mean-field strategies in
/// the game with `n_players` minor traders.
///
/// Both deviating players' best responses are computed exactly from the
/// discretized objectives (tridiagonal normal equations); the major's
/// objective is unchanged by finite `N` (its own rate never enters the
/// average), so `eps_major` is zero up to rounding, while `eps_minor`
/// carries the genuine `1/N` self-impact effect.
pub fn best_response_gap(
    sol: &EquilibriumSolution,
    target: &TargetStrategy,
    params: &MarketParams,
    inv: &Inventories,
    n_players: usize,
    grid: &Grid,
) -> Result<GapReport> {
    if n_players == 0 {
        return Err(Error::InvalidParameter("the game needs at least one minor trader".into()));
    }
    if sol.major.grid() != *grid {
        return Err(Error::GridMismatch(
            "solution grid differs from the requested evaluation grid".into(),
        ));
    }
    let t_end = grid.t_end();
    if (target.horizon() - t_end).abs() > SPAN_EPS * t_end.abs().max(1.0) {
        return Err(Error::GridMismatch(format!(
            "target horizon {} does not span the grid end {}",
            target.horizon(),
            t_end
        )));
    }

    let h = grid.step();
    let nodes = grid.num_nodes();
    let r: Vec<f64> =
        (0..nodes).map(|j| target.target_inventory(grid.node(j))).collect::<Result<_>>()?;
    let zeta = sol.rate_major.values();
    let mu = sol.rate_minor.values();
    let z = sol.major.values();
    let w = sol.minor.values();
    let interior = nodes - 2;

    // Major: exogenous crowd, so the best response re-solves the mean-field
    // stencil; the gap is pure rounding.
    let br_major = major_best_response(params, &r, mu, (inv.major, 0.0), h)?;
    let d_major: Vec<f64> = (0..interior).map(|j| z[j + 1] - br_major[j]).collect();
    let eps_major =
        quadratic_gap(&d_major, 4.0 * params.a0 / h + 2.0 * params.phi0 * h, -2.0 * params.a0 / h);

    // Minor: the own rate enters the average at weight 1/N.
    let n = n_players as f64;
    let crowd_weight = params.lambda * (n - 1.0) / n;
    let own_weight = params.lambda / n;
    let br_minor =
        minor_best_response(params, zeta, mu, crowd_weight, own_weight, (inv.minor, 0.0), h)?;
    let d_minor: Vec<f64> = (0..interior).map(|j| w[j + 1] - br_minor[j]).collect();
    let eps_minor = quadratic_gap(
        &d_minor,
        4.0 * params.a / h + 2.0 * params.phi * h + 2.0 * own_weight,
        -2.0 * params.a / h - own_weight,
    );

    let (kappa, k_val) = mf_constants(sol);
    let (bound_major, bound_minor) = theoretical_bounds(kappa, k_val, n_players, params);
    Ok(GapReport { n_players, kappa, k_val, bound_major, bound_minor, eps_major, eps_minor })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdsolver::solve_equilibrium;
    use crate::numeric::forward_rates;

    fn preset() -> MarketParams {
        MarketParams::new(0.001, 0.001, 0.01, 0.005, 0.1, 0.01, 0.1, 10.0).unwrap()
    }

    const B: f64 = 0.5 / std::f64::consts::PI;

    #[test]
    fn twap_constants_are_exact() {
        let p = MarketParams::new(0.001, 0.001, 0.0, 0.0, 0.1, 0.01, 0.1, 10.0).unwrap();
        let inv = Inventories::new(10.0, 0.0).unwrap();
        let target = TargetStrategy::d_twap(10.0, 10.0).unwrap();
        let grid = Grid::from_parts(10.0, 1000).unwrap();
        let sol = solve_equilibrium(&p, &inv, &target, &grid).unwrap();
        let (kappa, k_val) = mf_constants(&sol);
        assert!((kappa - 10.0).abs() < 1e-6, "unit rate over T = 10 has energy 10");
        assert!(k_val.abs() < 1e-12, "flat minor contributes no energy");
    }

    #[test]
    fn bounds_follow_the_closed_forms() {
        let p = preset();
        let (bound_major, bound_minor) = theoretical_bounds(10.0, 0.0, 100, &p);
        assert!((bound_major - 0.1).abs() < 1e-15, "lambda 2 T kappa / sqrt(N)");
        assert_eq!(bound_minor, 0.0, "no minor energy, no minor bound");
        let (b1, _) = theoretical_bounds(10.0, 0.0, 25, &p);
        let (b4, _) = theoretical_bounds(10.0, 0.0, 100, &p);
        assert!((b4 / b1 - 0.5).abs() < 1e-14, "major bound scales as 1/sqrt(N)");
    }

    #[test]
    fn own_term_free_best_responses_recover_the_equilibrium() {
        let p = preset();
        let inv = Inventories::new(10.0, 0.0).unwrap();
        let target = TargetStrategy::cosine(10.0, 10.0, 10, B).unwrap();
        let grid = Grid::from_parts(10.0, 1000).unwrap();
        let sol = solve_equilibrium(&p, &inv, &target, &grid).unwrap();
        let h = grid.step();
        let r: Vec<f64> =
            (0..grid.num_nodes()).map(|j| target.target_inventory(grid.node(j)).unwrap()).collect();

        let br_major =
            major_best_response(&p, &r, sol.rate_minor.values(), (inv.major, 0.0), h).unwrap();
        let br_minor = minor_best_response(
            &p,
            sol.rate_major.values(),
            sol.rate_minor.values(),
            p.lambda,
            0.0,
            (inv.minor, 0.0),
            h,
        )
        .unwrap();
        let mut worst = 0.0f64;
        for j in 0..br_major.len() {
            worst = worst
                .max((br_major[j] - sol.major.values()[j + 1]).abs())
                .max((br_minor[j] - sol.minor.values()[j + 1]).abs());
        }
        assert!(
            worst < 1e-9,
            "stationarity of the quadratic objectives must match the stencils, off by {worst}"
        );
        let rate_br = forward_rates(&br_major, h);
        assert!(rate_br.len() == br_major.len(), "rates align with inventories");
    }

    #[test]
    fn gaps_are_small_bounded_and_shrink_with_n() {
        let p = preset();
        let inv = Inventories::new(10.0, 0.0).unwrap();
        let target = TargetStrategy::cosine(10.0, 10.0, 10, B).unwrap();
        let grid = Grid::from_parts(10.0, 1000).unwrap();
        let sol = solve_equilibrium(&p, &inv, &target, &grid).unwrap();

        let few = best_response_gap(&sol, &target, &p, &inv, 2, &grid).unwrap();
        let many = best_response_gap(&sol, &target, &p, &inv, 100, &grid).unwrap();
        for report in [&few, &many] {
            assert!(report.eps_major >= 0.0 && report.eps_major <= 1e-10);
            assert!(report.eps_minor >= 0.0);
            assert!(
                report.eps_minor <= report.bound_minor + 1e-9,
                "empirical gap {} exceeds the bound {}",
                report.eps_minor,
                report.bound_minor
            );
        }
        assert!(many.eps_minor < few.eps_minor, "self-impact fades as the crowd grows");
        assert!(few.eps_minor > 0.0, "finite crowds leave a genuine gap");
    }

    #[test]
    fn mismatched_grid_is_rejected() {
        let p = preset();
        let inv = Inventories::new(10.0, 0.0).unwrap();
        let target = TargetStrategy::cosine(10.0, 10.0, 10, B).unwrap();
        let grid = Grid::from_parts(10.0, 1000).unwrap();
        let other = Grid::from_parts(10.0, 500).unwrap();
        let sol = solve_equilibrium(&p, &inv, &target, &grid).unwrap();
        assert!(matches!(
            best_response_gap(&sol, &target, &p, &inv, 10, &other),
            Err(Error::GridMismatch(_))
        ));
    }
}
