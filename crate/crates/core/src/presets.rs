//! Canonical experiment setups used by the benchmark tables and the CLI.
//!
//! All three experiments share a single market parameterization,
//!
//! ```text
//! a0 = a = 0.001,  lambda0 = 0.01,  lambda = 0.005,
//! phi0 = 0.1,      phi = 0.01,      sigma = 0.1,     T = 10,
//! ```
//!
//! with the major population liquidating `q0_major = 10` shares and minor
//! traders starting flat (`q0_minor = 0`).  The experiments differ only in the
//! targeting schedule:
//!
//! * **`cos`** — smooth cosine-rate schedule with `n = 10` periods and rate
//!   amplitude `b = 1/(2 pi)`, so the inventory oscillation has unit angular
//!   frequency content at `omega = 2 pi`.
//! * **`twap`** — piecewise-constant schedule that jumps by `q0/10` at each
//!   integer time (the inventory at interior times sits at the midpoint
//!   value, making the residual a mean-zero sawtooth).
//! * **`vwap`** — U-shaped trend rate with superimposed oscillations,
//!   `v(t) = -(15/370)(t-7)^2 - 0.5 + 0.75 cos(4 pi t)` on `[0, 3)` and
//!   `v(t) = -(15/370)(t-7)^2 - 0.5 + 0.5 cos(2 pi t)` on `[3, 10]`,
//!   tabulated on a fine uniform mesh as a sampled-rate schedule.  The rate
//!   integrates to `-10` exactly, matching the initial inventory.

use crate::error::Result;
use crate::model::{Grid, Inventories, MarketParams, TargetStrategy};

/// Trading horizon shared by every preset (time units).
pub const HORIZON: f64 = 10.0;

/// Shares initially held by the major population in every preset.
pub const Q0_MAJOR: f64 = 10.0;

/// Shares initially held by the representative minor trader in every preset.
pub const Q0_MINOR: f64 = 0.0;

/// Period count of the cosine and TWAP targeting schedules.
pub const N_PERIODS: u32 = 10;

/// Rate amplitude of the cosine schedule: `1/(2 pi)` gives an inventory
/// oscillation of amplitude `b/omega = 1/(4 pi^2) * T/n` around the line.
pub const COSINE_AMPLITUDE: f64 = 0.5 / std::f64::consts::PI;

/// Mesh width used by default when a run does not override the grid.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Sampling step used to tabulate the VWAP rate (`1e-4` keeps the
/// piecewise-linear interpolation error of the cumulative inventory below
/// `1e-9` shares, inside the liquidation tolerance of the constructor).
const VWAP_SAMPLE_STEP: f64 = 1e-4;

/// A named, fully specified experiment.
#[derive(Debug, Clone)]
pub struct Preset {
    /// Identifier accepted by [`by_name`]: `"cos"`, `"twap"`, or `"vwap"`.
    pub name: &'static str,
    /// Market parameters (identical across presets).
    pub params: MarketParams,
    /// Initial inventories of the two populations.
    pub inventories: Inventories,
    /// Targeting schedule tracked by the major trader.
    pub target: TargetStrategy,
    /// Periods available for periodic/trend decomposition, when the target
    /// is periodic in the strict sense (`None` for the VWAP schedule).
    pub n_periods: Option<u32>,
}

impl Preset {
    /// Default solution mesh: step [`DEFAULT_STEP`] over the preset horizon.
    pub fn default_grid(&self) -> Grid {
        Grid::with_step(self.params.horizon, DEFAULT_STEP)
            .expect("preset horizon and default step are valid")
    }
}

/// Market parameters shared by every preset experiment.
pub fn market_params() -> MarketParams {
    MarketParams::new(1e-3, 1e-3, 0.01, 0.005, 0.1, 0.01, 0.1, HORIZON)
        .expect("preset market parameters are valid")
}

/// Initial inventories shared by every preset experiment.
pub fn inventories() -> Inventories {
    Inventories::new(Q0_MAJOR, Q0_MINOR).expect("preset inventories are valid")
}

/// The cosine-target experiment.
pub fn cosine() -> Preset {
    Preset {
        name: "cos",
        params: market_params(),
        inventories: inventories(),
        target: TargetStrategy::cosine(Q0_MAJOR, HORIZON, N_PERIODS, COSINE_AMPLITUDE)
            .expect("preset cosine target is valid"),
        n_periods: Some(N_PERIODS),
    }
}

/// The TWAP-target experiment.
pub fn twap() -> Preset {
    Preset {
        name: "twap",
        params: market_params(),
        inventories: inventories(),
        target: TargetStrategy::twap_step(Q0_MAJOR, HORIZON, N_PERIODS)
            .expect("preset TWAP target is valid"),
        n_periods: Some(N_PERIODS),
    }
}

/// The VWAP-target experiment.
pub fn vwap() -> Preset {
    Preset {
        name: "vwap",
        params: market_params(),
        inventories: inventories(),
        target: TargetStrategy::sampled_rate(Q0_MAJOR, HORIZON, vwap_rate_samples())
            .expect("preset VWAP target is valid"),
        n_periods: None,
    }
}

/// Look up a preset by its short name (`"cos"`, `"twap"`, `"vwap"`).
pub fn by_name(name: &str) -> Option<Preset> {
    match name {
        "cos" => Some(cosine()),
        "twap" => Some(twap()),
        "vwap" => Some(vwap()),
        _ => None,
    }
}

/// Shared U-shaped trend of the VWAP rate: `-(15/370)(t-7)^2 - 0.5`.
fn vwap_base_rate(t: f64) -> f64 {
    -(15.0 / 370.0) * (t - 7.0) * (t - 7.0) - 0.5
}

/// VWAP rate on the left branch `[0, 3)`: half-period oscillation.
fn vwap_rate_left(t: f64) -> f64 {
    vwap_base_rate(t) + 0.75 * (4.0 * std::f64::consts::PI * t).cos()
}

/// VWAP rate on the right branch `[3, 10]`: unit-period oscillation.
fn vwap_rate_right(t: f64) -> f64 {
    vwap_base_rate(t) + 0.5 * (2.0 * std::f64::consts::PI * t).cos()
}

/// Tabulate the VWAP rate on the uniform mesh of step [`VWAP_SAMPLE_STEP`].
///
/// The rate jumps at `t = 3` (the oscillation amplitude and frequency both
/// change); the sample at that node takes the average of the two one-sided
/// limits so that the trapezoid integral of the tabulated rate matches the
/// exact integral of the piecewise-smooth rate to `O(h^2)` on both sides.
fn vwap_rate_samples() -> Vec<f64> {
    let n = (HORIZON / VWAP_SAMPLE_STEP).round() as usize;
    let jump = (3.0 / VWAP_SAMPLE_STEP).round() as usize;
    (0..=n)
        .map(|i| {
            let t = i as f64 * VWAP_SAMPLE_STEP;
            if i < jump {
                vwap_rate_left(t)
            } else if i == jump {
                0.5 * (vwap_rate_left(t) + vwap_rate_right(t))
            } else {
                vwap_rate_right(t)
            }
        })
        .collect()
}

/// Exact integral of the VWAP rate over `[0, T]`.
///
/// Both cosine overlays complete whole periods on their branches, so only the
/// polynomial trend contributes: `-(5/370)[(t-7)^3]_0^10 - 5 = -10` exactly.
pub fn vwap_rate_integral() -> f64 {
    let cubic = |t: f64| -(5.0 / 370.0) * (t - 7.0).powi(3) - 0.5 * t;
    cubic(HORIZON) - cubic(0.0)
}

/// Validate every preset end to end (constructor invariants plus horizon
/// consistency between market and target).
pub fn check_all() -> Result<()> {
    for name in ["cos", "twap", "vwap"] {
        let p = by_name(name).expect("known preset name");
        if p.params.horizon != p.target.horizon() {
            return Err(crate::error::Error::InvalidParameter(format!(
                "preset {name}: market horizon {} != target horizon {}",
                p.params.horizon,
                p.target.horizon()
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_params;

    #[test]
    fn market_parameters_match_documented_values() {
        let p = market_params();
        assert_eq!(p.a0, 1e-3, "major temporary impact");
        assert_eq!(p.a, 1e-3, "minor temporary impact");
        assert_eq!(p.lambda0, 0.01, "major permanent impact");
        assert_eq!(p.lambda, 0.005, "minor permanent impact");
        assert_eq!(p.phi0, 0.1, "major risk aversion");
        assert_eq!(p.phi, 0.01, "minor risk aversion");
        assert_eq!(p.sigma, 0.1, "volatility");
        assert_eq!(p.horizon, 10.0, "horizon");
    }

    #[test]
    fn preset_parameters_are_feasible() {
        let report = validate_params(&market_params());
        assert!(report.feasible, "preset market parameters must satisfy the wellposedness test");
    }

    #[test]
    fn by_name_round_trips_and_rejects_unknown() {
        for name in ["cos", "twap", "vwap"] {
            let p = by_name(name).expect("known preset");
            assert_eq!(p.name, name, "preset name round-trip");
        }
        assert!(by_name("pov").is_none(), "unknown preset name must yield None");
    }

    #[test]
    fn cosine_and_twap_presets_have_ten_periods() {
        assert_eq!(cosine().target.n_periods(), Some(10));
        assert_eq!(twap().target.n_periods(), Some(10));
        assert_eq!(vwap().target.n_periods(), None, "sampled rates carry no period count");
        assert_eq!(cosine().n_periods, Some(10));
        assert_eq!(vwap().n_periods, None);
    }

    #[test]
    fn vwap_rate_integrates_to_initial_inventory() {
        assert_eq!(vwap_rate_integral(), -10.0, "trend integral is exactly -10");
        let p = vwap();
        // The sampled-rate constructor has already verified terminal
        // liquidation to 1e-8; check the stored cumulative directly.
        let terminal = p.target.target_inventory(HORIZON).unwrap();
        assert!(terminal.abs() <= 1e-8, "VWAP terminal inventory {terminal:.3e} should vanish");
        assert_eq!(p.target.target_inventory(0.0).unwrap(), 10.0, "initial inventory");
    }

    #[test]
    fn vwap_rate_matches_branch_formulas() {
        let p = vwap();
        // Left branch at t = 0: base(0) + 0.75 = -(15/370)*49 - 0.5 + 0.75.
        let left = p.target.target_rate(0.0).unwrap();
        assert!((left - (-(15.0 / 370.0) * 49.0 + 0.25)).abs() < 1e-12, "rate at t=0: got {left}");
        // Right branch at t = 5: base(5) + 0.5 (cos(10 pi) = 1).
        let right = p.target.target_rate(5.0).unwrap();
        assert!(
            (right - (-(15.0 / 370.0) * 4.0 - 0.5 + 0.5)).abs() < 1e-10,
            "rate at t=5: got {right}"
        );
        // The jump node t = 3 stores the branch average: both cosines equal 1
        // there, so the sample is base(3) + (0.75 + 0.5)/2.
        let mid = p.target.target_rate(3.0).unwrap();
        assert!(
            (mid - (-(15.0 / 370.0) * 16.0 - 0.5 + 0.625)).abs() < 1e-10,
            "rate at t=3: got {mid}"
        );
    }

    #[test]
    fn default_grid_uses_millisecond_step() {
        let g = cosine().default_grid();
        assert_eq!(g.n_mesh(), 10_000, "10/0.001 mesh cells");
        assert_eq!(g.t_end(), 10.0);
    }

    #[test]
    fn check_all_accepts_presets() {
        check_all().expect("presets are internally consistent");
    }
}
