//! Computation pipelines behind the command-line verbs: equilibrium and
//! benchmark solves, periodic/trend decomposition, cost and amplitude tables,
//! spectra, and finite-population gap reports, together with the JSON/CSV
//! shapes they are emitted in.

use liqgame_core::analysis::{
    aggregate_inventory, aggregate_rate, amplitude, evaluate_costs, periodic_price, price_path,
    spectral_amplitudes, CostPair, DEFAULT_DETREND_DEGREE,
};
use liqgame_core::nplayer::best_response_gap;
use liqgame_core::{
    assemble_decomposition, solve_equilibrium, solve_no_interaction, solve_periodic,
    solve_periodic_no_interaction, solve_trend, CostBreakdown, Decomposition, EquilibriumSolution,
    GapReport, Grid, GridFn, MarketParams, PeriodicSolution, Result, TargetStrategy,
};
use serde::Serialize;

use crate::config::Experiment;

/// Number of Fourier modes written to the spectrum artifacts.
pub const SPECTRUM_KMAX: usize = 50;

/// Column order of `trajectories.csv`.
pub const TRAJECTORY_HEADER: &str = "t,q_major,q_minor,v_major,v_minor,price";

/// Column order of `decomposition.csv`.
pub const DECOMPOSITION_HEADER: &str = "t,periodic_major,periodic_minor,trend_major,trend_minor";

/// JSON shape of one trader's cost breakdown.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CostRowJson {
    /// Expected profit of trading the trader's own inventory (cash).
    pub profit_q: f64,
    /// Expected profit of the target schedule (cash; zero for minors).
    pub profit_r: f64,
    /// Running risk penalty (cash).
    pub risk: f64,
    /// Total cost (cash).
    pub total: f64,
}

impl From<CostBreakdown> for CostRowJson {
    fn from(b: CostBreakdown) -> Self {
        Self { profit_q: b.profit_q, profit_r: b.profit_r, risk: b.risk, total: b.total }
    }
}

/// JSON shape of the four-column cost table: both traders, with and without
/// interactions.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CostTableJson {
    /// Major trader at the equilibrium.
    pub major_equilibrium: CostRowJson,
    /// Major trader optimizing against a flat price.
    pub major_no_interaction: CostRowJson,
    /// Representative minor trader at the equilibrium.
    pub minor_equilibrium: CostRowJson,
    /// Representative minor trader against a flat price.
    pub minor_no_interaction: CostRowJson,
}

impl CostTableJson {
    fn new(equilibrium: &CostPair, no_interaction: &CostPair) -> Self {
        Self {
            major_equilibrium: equilibrium.major.into(),
            major_no_interaction: no_interaction.major.into(),
            minor_equilibrium: equilibrium.minor.into(),
            minor_no_interaction: no_interaction.minor.into(),
        }
    }
}

/// JSON shape of `amplitudes.json`: peak-to-midline amplitudes of every
/// periodic-component summary, side by side.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AmplitudesJson {
    /// Aggregate trading rate `v_major + v_minor` (shares/time).
    pub rate_equilibrium: f64,
    /// Same, for the interaction-free benchmark.
    pub rate_no_interaction: f64,
    /// Impact-weighted price `lambda0 Q_major + lambda Q_minor` (cash).
    pub price_equilibrium: f64,
    /// Same, for the interaction-free benchmark.
    pub price_no_interaction: f64,
    /// Aggregate periodic inventory `Q_major + Q_minor` (shares).
    pub aggregate_inventory_equilibrium: f64,
    /// Same, for the interaction-free benchmark.
    pub aggregate_inventory_no_interaction: f64,
}

impl AmplitudesJson {
    /// Projects onto the published table convention: smooth targets quote the
    /// impact-weighted price in the price rows, step targets quote the
    /// aggregate periodic inventory.
    pub fn as_table(&self, price_is_aggregate_inventory: bool) -> AmplitudeTableJson {
        let (price_equilibrium, price_no_interaction) = if price_is_aggregate_inventory {
            (self.aggregate_inventory_equilibrium, self.aggregate_inventory_no_interaction)
        } else {
            (self.price_equilibrium, self.price_no_interaction)
        };
        AmplitudeTableJson {
            rate_equilibrium: self.rate_equilibrium,
            rate_no_interaction: self.rate_no_interaction,
            price_equilibrium,
            price_no_interaction,
            price_is_aggregate_inventory,
        }
    }
}

/// JSON shape of the periodic-amplitude table inside `summary.json`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AmplitudeTableJson {
    /// Aggregate-rate amplitude at the equilibrium (shares/time).
    pub rate_equilibrium: f64,
    /// Aggregate-rate amplitude of the interaction-free benchmark.
    pub rate_no_interaction: f64,
    /// Price-row amplitude at the equilibrium (see the flag for its units).
    pub price_equilibrium: f64,
    /// Price-row amplitude of the interaction-free benchmark.
    pub price_no_interaction: f64,
    /// `true` when the price rows quote the aggregate periodic inventory
    /// (shares) rather than the impact-weighted price (cash).
    pub price_is_aggregate_inventory: bool,
}

/// JSON shape of one finite-population gap record.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapRowJson {
    /// Number of minor traders.
    pub n_players: usize,
    /// Rate energy bound of the mean-field strategies (shares²/time).
    pub kappa: f64,
    /// Minor rate energy (shares²/time).
    pub k_val: f64,
    /// Theoretical major suboptimality bound (cash).
    pub bound_major: f64,
    /// Theoretical minor suboptimality bound (cash).
    pub bound_minor: f64,
    /// Empirical major suboptimality (cash).
    pub eps_major: f64,
    /// Empirical minor suboptimality (cash).
    pub eps_minor: f64,
}

impl From<GapReport> for GapRowJson {
    fn from(r: GapReport) -> Self {
        Self {
            n_players: r.n_players,
            kappa: r.kappa,
            k_val: r.k_val,
            bound_major: r.bound_major,
            bound_minor: r.bound_minor,
            eps_major: r.eps_major,
            eps_minor: r.eps_minor,
        }
    }
}

/// `summary.json`: bundled presets publish their tables under the keys
/// scripted comparisons expect (`table1`/`table2` for the cosine preset,
/// `table3`/`table4` for the step preset, `table5` for the intraday-profile
/// preset); custom configurations use the generic `costs`/`amplitudes` keys.
#[derive(Debug, Serialize)]
pub struct Summary {
    /// Bundled preset name, when one was requested.
    pub preset: Option<String>,
    /// Grid step the run was computed at.
    pub grid_h: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table1: Option<CostTableJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table2: Option<AmplitudeTableJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table3: Option<CostTableJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table4: Option<AmplitudeTableJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table5: Option<CostTableJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub costs: Option<CostTableJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<AmplitudeTableJson>,
}

impl Summary {
    /// Routes the computed tables to the keys matching the experiment.
    pub fn new(
        exp: &Experiment,
        costs: &CostTableJson,
        amplitudes: Option<AmplitudeTableJson>,
    ) -> Self {
        let mut summary = Self {
            preset: exp.preset.clone(),
            grid_h: exp.grid.step(),
            table1: None,
            table2: None,
            table3: None,
            table4: None,
            table5: None,
            costs: None,
            amplitudes: None,
        };
        match exp.preset.as_deref() {
            Some("cos") => {
                summary.table1 = Some(*costs);
                summary.table2 = amplitudes;
            }
            Some("twap") => {
                summary.table3 = Some(*costs);
                summary.table4 = amplitudes;
            }
            Some("vwap") => summary.table5 = Some(*costs),
            _ => {
                summary.costs = Some(*costs);
                summary.amplitudes = amplitudes;
            }
        }
        summary
    }
}

/// Everything the periodic/trend decomposition yields for one experiment.
pub struct PeriodicBundle {
    /// Periodic components at the equilibrium, over the first period.
    pub periodic: PeriodicSolution,
    /// Periodic components of the interaction-free benchmark.
    pub periodic_free: PeriodicSolution,
    /// Tiled periodic and trend components on the full grid.
    pub decomposition: Decomposition,
}

/// Solves the equilibrium and the interaction-free benchmark.
pub fn solve_pair(exp: &Experiment) -> Result<(EquilibriumSolution, EquilibriumSolution)> {
    let equilibrium = solve_equilibrium(&exp.params, &exp.inv, &exp.target, &exp.grid)?;
    let benchmark = solve_no_interaction(&exp.params, &exp.inv, &exp.target, &exp.grid)?;
    Ok((equilibrium, benchmark))
}

/// Solves the periodic fixed point (both coupling modes) and the trend, and
/// assembles the decomposition on the full grid. Fails for targets without a
/// periodic residual (sampled rates).
pub fn periodic_bundle(exp: &Experiment) -> Result<PeriodicBundle> {
    let residual = exp.target.periodic_residual()?;
    // Targets without an intrinsic period (straight lines) decompose over a
    // single period spanning the whole horizon.
    let n_periods = exp.target.n_periods().unwrap_or(1);
    let period = exp.target.horizon() / f64::from(n_periods);
    let grid_per = Grid::with_step(period, exp.grid.step())?;
    let periodic = solve_periodic(&exp.params, &residual, n_periods, &grid_per, &exp.options)?;
    let periodic_free =
        solve_periodic_no_interaction(&exp.params, &residual, n_periods, &grid_per, &exp.options)?;
    let q0_per = (periodic.major.values()[0], periodic.minor.values()[0]);
    let trend = solve_trend(&exp.params, &exp.inv, q0_per, &exp.grid)?;
    let (decomposition, _reassembled) =
        assemble_decomposition(&periodic, &trend, &exp.inv, n_periods)?;
    Ok(PeriodicBundle { periodic, periodic_free, decomposition })
}

/// Evaluates both traders' cost breakdowns for the solved pair.
pub fn cost_table(
    exp: &Experiment,
    equilibrium: &EquilibriumSolution,
    benchmark: &EquilibriumSolution,
) -> Result<CostTableJson> {
    let eq = evaluate_costs(equilibrium, &exp.target, &exp.params)?;
    let free = evaluate_costs(benchmark, &exp.target, &exp.params)?;
    Ok(CostTableJson::new(&eq, &free))
}

/// Peak-to-midline amplitudes of the periodic components, in every summary
/// convention.
pub fn amplitudes(exp: &Experiment, bundle: &PeriodicBundle) -> AmplitudesJson {
    AmplitudesJson {
        rate_equilibrium: amplitude(&aggregate_rate(&bundle.periodic)),
        rate_no_interaction: amplitude(&aggregate_rate(&bundle.periodic_free)),
        price_equilibrium: amplitude(&periodic_price(&bundle.periodic, &exp.params)),
        price_no_interaction: amplitude(&periodic_price(&bundle.periodic_free, &exp.params)),
        aggregate_inventory_equilibrium: amplitude(&aggregate_inventory(&bundle.periodic)),
        aggregate_inventory_no_interaction: amplitude(&aggregate_inventory(&bundle.periodic_free)),
    }
}

/// Step-target tables quote the aggregate periodic inventory in their price
/// rows (its impact-weighted counterpart mixes the jump discontinuities into
/// the peak); smooth targets quote the impact-weighted price itself.
pub fn price_convention_is_inventory(target: &TargetStrategy) -> bool {
    matches!(target, TargetStrategy::TwapStep { .. } | TargetStrategy::TwapResidual { .. })
}

/// Spectrum rows `(k, equilibrium amplitude, benchmark amplitude)`.
pub type SpectrumRows = Vec<(usize, f64, f64)>;

/// Fourier mode magnitudes of the aggregate trading rate and of the price
/// path, equilibrium against the interaction-free benchmark.
pub fn spectra(
    exp: &Experiment,
    equilibrium: &EquilibriumSolution,
    benchmark: &EquilibriumSolution,
) -> Result<(SpectrumRows, SpectrumRows)> {
    let modes = |series: &GridFn| -> Result<Vec<f64>> {
        Ok(spectral_amplitudes(series, SPECTRUM_KMAX, DEFAULT_DETREND_DEGREE)?.amplitudes)
    };
    let rate_eq = modes(&aggregate_rate_full(equilibrium))?;
    let rate_ng = modes(&aggregate_rate_full(benchmark))?;
    let price_eq = modes(&price_path(equilibrium, &exp.params))?;
    let price_ng = modes(&price_path(benchmark, &exp.params))?;
    let zip = |eq: Vec<f64>, ng: Vec<f64>| -> SpectrumRows {
        eq.into_iter().zip(ng).enumerate().map(|(i, (e, n))| (i + 1, e, n)).collect()
    };
    Ok((zip(rate_eq, rate_ng), zip(price_eq, price_ng)))
}

/// Aggregate trading rate `v_major + v_minor` on the full solution grid.
fn aggregate_rate_full(sol: &EquilibriumSolution) -> GridFn {
    let major = sol.rate_major.values();
    let minor = sol.rate_minor.values();
    let values: Vec<f64> = (0..major.len()).map(|j| major[j] + minor[j]).collect();
    GridFn::new(sol.rate_major.grid(), values).expect("values built on the solution grid")
}

/// Best-response gap records for each requested population size. The records
/// are independent reads of the same solution, so they are computed
/// concurrently; the output keeps the requested order.
pub fn gap_rows(exp: &Experiment, sol: &EquilibriumSolution) -> Result<Vec<GapRowJson>> {
    let reports: Vec<Result<GapReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = exp
            .nplayer_sizes
            .iter()
            .map(|&n| {
                scope.spawn(move || {
                    best_response_gap(sol, &exp.target, &exp.params, &exp.inv, n, &exp.grid)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("gap worker panicked")).collect()
    });
    reports.into_iter().map(|r| r.map(GapRowJson::from)).collect()
}

/// Rows of `trajectories.csv` in [`TRAJECTORY_HEADER`] order.
pub fn trajectory_rows(sol: &EquilibriumSolution, params: &MarketParams) -> Vec<Vec<f64>> {
    let grid = sol.major.grid();
    let price = price_path(sol, params);
    (0..grid.num_nodes())
        .map(|j| {
            vec![
                grid.node(j),
                sol.major.values()[j],
                sol.minor.values()[j],
                sol.rate_major.values()[j],
                sol.rate_minor.values()[j],
                price.values()[j],
            ]
        })
        .collect()
}

/// Rows of `decomposition.csv` in [`DECOMPOSITION_HEADER`] order.
pub fn decomposition_rows(decomposition: &Decomposition) -> Vec<Vec<f64>> {
    let grid = decomposition.periodic_major.grid();
    (0..grid.num_nodes())
        .map(|j| {
            vec![
                grid.node(j),
                decomposition.periodic_major.values()[j],
                decomposition.periodic_minor.values()[j],
                decomposition.trend_major.values()[j],
                decomposition.trend_minor.values()[j],
            ]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Experiment;

    fn coarse(preset: &str) -> Experiment {
        Experiment::from_preset(preset, Some(0.01), None).expect("preset resolves")
    }

    #[test]
    fn amplitude_table_projection_follows_the_convention_flag() {
        let all = AmplitudesJson {
            rate_equilibrium: 1.0,
            rate_no_interaction: 2.0,
            price_equilibrium: 3.0,
            price_no_interaction: 4.0,
            aggregate_inventory_equilibrium: 5.0,
            aggregate_inventory_no_interaction: 6.0,
        };
        let weighted = all.as_table(false);
        assert_eq!((weighted.price_equilibrium, weighted.price_no_interaction), (3.0, 4.0));
        assert!(!weighted.price_is_aggregate_inventory);
        let inventory = all.as_table(true);
        assert_eq!((inventory.price_equilibrium, inventory.price_no_interaction), (5.0, 6.0));
        assert!(inventory.price_is_aggregate_inventory);
    }

    #[test]
    fn summary_routes_tables_by_preset() {
        let exp = coarse("cos");
        let (sol, free) = solve_pair(&exp).expect("coarse solve");
        let costs = cost_table(&exp, &sol, &free).expect("costs evaluate");
        let summary = Summary::new(&exp, &costs, None);
        assert!(summary.table1.is_some() && summary.costs.is_none(), "preset keys");

        let mut custom = coarse("cos");
        custom.preset = None;
        let summary = Summary::new(&custom, &costs, None);
        assert!(summary.table1.is_none() && summary.costs.is_some(), "generic keys");
    }

    #[test]
    fn trajectory_rows_carry_the_price_path_in_the_last_column() {
        let exp = coarse("cos");
        let (sol, _) = solve_pair(&exp).expect("coarse solve");
        let rows = trajectory_rows(&sol, &exp.params);
        assert_eq!(rows.len(), exp.grid.num_nodes());
        let price = price_path(&sol, &exp.params);
        for (j, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), 6, "six columns per row");
            assert_eq!(row[5], price.values()[j], "price column at node {j}");
        }
        assert_eq!(rows[0][5], 0.0, "price starts at zero by construction");
    }

    #[test]
    fn aggregate_rate_sums_the_two_traders_nodewise() {
        let exp = coarse("cos");
        let (sol, _) = solve_pair(&exp).expect("coarse solve");
        let total = aggregate_rate_full(&sol);
        for j in 0..exp.grid.num_nodes() {
            let expected = sol.rate_major.values()[j] + sol.rate_minor.values()[j];
            assert_eq!(total.values()[j], expected, "node {j}");
        }
    }

    #[test]
    fn decomposition_reaches_the_full_grid() {
        let exp = coarse("twap");
        let bundle = periodic_bundle(&exp).expect("step target decomposes");
        let rows = decomposition_rows(&bundle.decomposition);
        assert_eq!(rows.len(), exp.grid.num_nodes(), "tiled onto the full horizon");
        assert_eq!(rows[0].len(), 5, "five columns per row");
    }
}
