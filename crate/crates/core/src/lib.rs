//! Open-loop Nash equilibrium of a major–minor liquidation game in its
//! deterministic regime.
//!
//! One large ("major") trader unwinds an inventory of `q0_major` shares over
//! a horizon `[0, T]` while tracking a scheduled targeting strategy `R`.
//! A continuum of small ("minor") traders — represented by their average —
//! trades around the price pressure the major creates. Inventory changes move
//! the price permanently,
//!
//! ```text
//! S(t) = lambda0 * (Q_major(t) - q0_major) + lambda * (Q_minor(t) - q0_minor),
//! ```
//!
//! execution prices additionally carry temporary impact proportional to each
//! trader's own rate (`a0`, `a`), and both sides pay quadratic running
//! penalties: the major against its target gap (`phi0`), the minor against
//! its open position (`phi`).
//!
//! The crate computes the equilibrium strategies and their structure:
//!
//! * [`model`] — market parameters, targeting strategies, grids, and the
//!   sufficient condition for well-posedness of the game.
//! * [`closedform`] — explicit solutions for the interaction-free benchmark
//!   and for sinusoidal targets (harmonic response, amplitudes, phases).
//! * [`fdsolver`] — finite-difference solvers for the coupled equilibrium
//!   system, its periodic/trend decomposition, and a matrix-exponential
//!   oracle for the periodic component.
//! * [`analysis`] — cost functionals, price paths, amplitude and spectral
//!   estimates.
//! * [`nplayer`] — finite-population approximation quality: best-response
//!   gaps against their theoretical bounds.
//! * [`presets`] — the bundled example configurations.
//! * [`reference`] — frozen reference values for the bundled presets.

pub mod analysis;
pub mod closedform;
pub mod error;
pub mod fdsolver;
pub mod model;
pub mod nplayer;
pub mod numeric;
pub mod presets;
pub mod reference;

pub use analysis::{CostBreakdown, CostPair, SpectralEstimate};
pub use closedform::{AmplitudePhase, HarmonicCoeffs, NoGameConstants, RateHarmonics};
pub use error::{Error, Result};
pub use fdsolver::{
    assemble_decomposition, periodic_oracle_matrix, solve_equilibrium, solve_no_interaction,
    solve_periodic, solve_periodic_no_interaction, solve_trend, Decomposition, EquilibriumSolution,
    OraclePeriodic, OracleTrajectory, PeriodicSolution, SolveOptions, TrendSolution,
};
pub use model::{
    validate_params, Grid, GridFn, Inventories, MarketParams, TargetStrategy, ValidationReport,
};
pub use nplayer::GapReport;
