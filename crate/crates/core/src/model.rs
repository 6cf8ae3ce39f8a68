//! Market primitives: impact/penalty parameters, initial inventories,
//! targeting strategies, uniform time grids, and the sufficient condition for
//! well-posedness of the liquidation game.

use crate::error::{Error, Result};
use crate::numeric;

/// Relative slack used when deciding whether a time lies on the horizon
/// boundary or whether a grid step divides a period length.
const TIME_EPS: f64 = 1e-9;

/// Market description shared by every solver in the crate.
///
/// All quantities are in consistent units: inventories in shares, time in the
/// unit of `horizon`, prices per share.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    /// Temporary impact coefficient of the major trader: trading at rate `v`
    /// costs `a0 * v^2` per unit time.
    pub a0: f64,
    /// Temporary impact coefficient of the representative minor trader.
    pub a: f64,
    /// Permanent price impact per share of major inventory change.
    pub lambda0: f64,
    /// Permanent price impact per share of average minor inventory change.
    pub lambda: f64,
    /// Running penalty weight on the major's deviation from its target.
    pub phi0: f64,
    /// Running penalty weight on the minor's open inventory.
    pub phi: f64,
    /// Price noise volatility. The deterministic-regime quantities computed in
    /// this crate do not depend on it; it is kept as part of the market
    /// description and echoed into reports.
    pub sigma: f64,
    /// Trading horizon `T` (end of the liquidation window).
    pub horizon: f64,
}

impl MarketParams {
    /// Builds a parameter set, rejecting values outside the model's domain:
    /// temporary impacts and penalties must be strictly positive, permanent
    /// impacts and volatility non-negative, the horizon strictly positive.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a0: f64,
        a: f64,
        lambda0: f64,
        lambda: f64,
        phi0: f64,
        phi: f64,
        sigma: f64,
        horizon: f64,
    ) -> Result<Self> {
        let p = Self { a0, a, lambda0, lambda, phi0, phi, sigma, horizon };
        for (name, v) in [
            ("a0", a0),
            ("a", a),
            ("lambda0", lambda0),
            ("lambda", lambda),
            ("phi0", phi0),
            ("phi", phi),
            ("sigma", sigma),
            ("horizon", horizon),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        for (name, v) in [("a0", a0), ("a", a), ("phi0", phi0), ("phi", phi), ("horizon", horizon)]
        {
            if v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        for (name, v) in [("lambda0", lambda0), ("lambda", lambda), ("sigma", sigma)] {
            if v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        Ok(p)
    }
}

/// Initial inventories: the major's block and the representative minor's
/// position (all minors start identically in the deterministic regime).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inventories {
    /// Major trader's initial inventory `q0_major` (shares).
    pub major: f64,
    /// Representative minor trader's initial inventory `q0_minor` (shares).
    pub minor: f64,
}

impl Inventories {
    /// Builds an inventory pair, rejecting non-finite values.
    pub fn new(major: f64, minor: f64) -> Result<Self> {
        if !major.is_finite() || !minor.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "inventories must be finite, got ({major}, {minor})"
            )));
        }
        Ok(Self { major, minor })
    }
}

/// Scheduled targeting strategy `R` the major trader is penalized against.
///
/// Every variant liquidates `q0` shares over `[0, horizon]`: `R(0) = q0` and
/// `R(horizon) = 0` (the residual variants carry zero net turnover instead).
#[derive(Debug, Clone, PartialEq)]
pub enum TargetStrategy {
    /// Straight-line schedule `R(t) = q0 * (1 - t/T)`.
    DTwap {
        /// Shares to liquidate.
        q0: f64,
        /// Trading horizon `T`.
        horizon: f64,
    },
    /// Straight line plus a sinusoid:
    /// `R(t) = q0 * (1 - t/T) + amplitude * sin(2 pi n_periods t / T)`.
    Cosine {
        /// Shares to liquidate.
        q0: f64,
        /// Trading horizon `T`.
        horizon: f64,
        /// Number of full oscillations over the horizon.
        n_periods: u32,
        /// Oscillation amplitude (shares).
        amplitude: f64,
    },
    /// Piecewise-constant schedule that steps down by `q0 / n_periods` once
    /// per period. On the open interval `(k p, (k+1) p)` with `p = T/n` the
    /// value is `q0 * (2n - 2k - 1) / (2n)`; at the jump times `k p` it takes
    /// the midpoint value `q0 * (n - k) / n`.
    TwapStep {
        /// Shares to liquidate.
        q0: f64,
        /// Trading horizon `T`.
        horizon: f64,
        /// Number of steps.
        n_periods: u32,
    },
    /// Sawtooth residual of [`TargetStrategy::TwapStep`] around the straight
    /// line: `-q0/(2n) + q0 tau / T` on each open period (with `tau` the time
    /// since the period start) and `0` at the jump times. Mean-zero and
    /// periodic with period `T/n`; `q0` records the parent schedule's size.
    TwapResidual {
        /// Parent schedule's size (the residual itself has zero turnover).
        q0: f64,
        /// Trading horizon `T`.
        horizon: f64,
        /// Number of sawtooth periods.
        n_periods: u32,
    },
    /// Arbitrary differentiable schedule described by trading rates sampled on
    /// a uniform grid over `[0, horizon]`. The rate is interpolated linearly
    /// between samples and the inventory is its exact running integral
    /// starting from `q0`; construct via [`TargetStrategy::sampled_rate`],
    /// which also enforces that the schedule liquidates.
    SampledRate {
        /// Shares to liquidate.
        q0: f64,
        /// Trading horizon `T`.
        horizon: f64,
        /// Rate samples at `i * sample_step`, `i = 0..rates.len()`.
        rates: Vec<f64>,
        /// Running trapezoid integral of `rates` at the sample nodes.
        cumulative: Vec<f64>,
        /// Spacing of the rate samples (`horizon / (rates.len() - 1)`).
        sample_step: f64,
    },
}

fn check_horizon(horizon: f64) -> Result<()> {
    if !horizon.is_finite() || horizon <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "target horizon must be strictly positive, got {horizon}"
        )));
    }
    Ok(())
}

fn check_periods(n_periods: u32) -> Result<()> {
    if n_periods == 0 {
        return Err(Error::InvalidParameter("n_periods must be at least 1".into()));
    }
    Ok(())
}

impl TargetStrategy {
    /// Straight-line schedule.
    pub fn d_twap(q0: f64, horizon: f64) -> Result<Self> {
        check_horizon(horizon)?;
        Ok(Self::DTwap { q0, horizon })
    }

    /// Straight line plus `amplitude * sin(2 pi n_periods t / T)`.
    pub fn cosine(q0: f64, horizon: f64, n_periods: u32, amplitude: f64) -> Result<Self> {
        check_horizon(horizon)?;
        check_periods(n_periods)?;
        if !amplitude.is_finite() {
            return Err(Error::InvalidParameter("amplitude must be finite".into()));
        }
        Ok(Self::Cosine { q0, horizon, n_periods, amplitude })
    }

    /// Piecewise-constant step-down schedule.
    pub fn twap_step(q0: f64, horizon: f64, n_periods: u32) -> Result<Self> {
        check_horizon(horizon)?;
        check_periods(n_periods)?;
        Ok(Self::TwapStep { q0, horizon, n_periods })
    }

    /// Sawtooth residual of the step-down schedule around the straight line.
    pub fn twap_residual(q0: f64, horizon: f64, n_periods: u32) -> Result<Self> {
        check_horizon(horizon)?;
        check_periods(n_periods)?;
        Ok(Self::TwapResidual { q0, horizon, n_periods })
    }

    /// Schedule from uniformly sampled trading rates.
    ///
    /// Requires at least two samples and a terminal inventory of zero: the
    /// trapezoid integral of the rates must cancel `q0` up to
    /// `max(1e-9 |q0|, 1e-12)`.
    pub fn sampled_rate(q0: f64, horizon: f64, rates: Vec<f64>) -> Result<Self> {
        check_horizon(horizon)?;
        if rates.len() < 2 {
            return Err(Error::InvalidParameter("sampled rate needs at least two samples".into()));
        }
        if rates.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidParameter("rate samples must be finite".into()));
        }
        let sample_step = horizon / (rates.len() - 1) as f64;
        let cumulative = numeric::cumulative_trapezoid(&rates, sample_step);
        let terminal = q0 + cumulative[cumulative.len() - 1];
        let tol = (1e-9 * q0.abs()).max(1e-12);
        if terminal.abs() > tol {
            return Err(Error::InvalidParameter(format!(
                "sampled rates do not liquidate: terminal inventory {terminal:.3e} \
                 exceeds tolerance {tol:.3e}"
            )));
        }
        Ok(Self::SampledRate { q0, horizon, rates, cumulative, sample_step })
    }

    /// Net shares the schedule liquidates (`0` for the residual variants).
    pub fn q0(&self) -> f64 {
        match *self {
            Self::DTwap { q0, .. }
            | Self::Cosine { q0, .. }
            | Self::TwapStep { q0, .. }
            | Self::SampledRate { q0, .. } => q0,
            Self::TwapResidual { .. } => 0.0,
        }
    }

    /// Trading horizon `T`.
    pub fn horizon(&self) -> f64 {
        match *self {
            Self::DTwap { horizon, .. }
            | Self::Cosine { horizon, .. }
            | Self::TwapStep { horizon, .. }
            | Self::TwapResidual { horizon, .. }
            | Self::SampledRate { horizon, .. } => horizon,
        }
    }

    /// Number of periods for the periodic variants.
    pub fn n_periods(&self) -> Option<u32> {
        match *self {
            Self::Cosine { n_periods, .. }
            | Self::TwapStep { n_periods, .. }
            | Self::TwapResidual { n_periods, .. } => Some(n_periods),
            Self::DTwap { .. } | Self::SampledRate { .. } => None,
        }
    }

    /// Clamps `t` into `[0, horizon]`, rejecting values outside a `1e-9`
    /// relative slack around the ends.
    fn clamp_time(&self, t: f64) -> Result<f64> {
        let t_end = self.horizon();
        let tol = TIME_EPS * t_end.max(1.0);
        if !t.is_finite() || t < -tol || t > t_end + tol {
            return Err(Error::OutOfDomain { t, t_end });
        }
        Ok(t.clamp(0.0, t_end))
    }

    /// Target inventory `R(t)`, defined pointwise on `[0, horizon]` (the step
    /// and sawtooth variants take their midpoint/zero values at jump times).
    pub fn target_inventory(&self, t: f64) -> Result<f64> {
        let t = self.clamp_time(t)?;
        Ok(match *self {
            Self::DTwap { q0, horizon } => q0 * (1.0 - t / horizon),
            Self::Cosine { q0, horizon, n_periods, amplitude } => {
                let omega = 2.0 * std::f64::consts::PI * f64::from(n_periods) / horizon;
                q0 * (1.0 - t / horizon) + amplitude * (omega * t).sin()
            }
            Self::TwapStep { q0, horizon, n_periods } => {
                let n = f64::from(n_periods);
                match step_position(t, horizon, n_periods) {
                    StepPosition::Node(k) => q0 * (n - k as f64) / n,
                    StepPosition::Interior(k) => q0 * (2.0 * n - 2.0 * k as f64 - 1.0) / (2.0 * n),
                }
            }
            Self::TwapResidual { q0, horizon, n_periods } => {
                let n = f64::from(n_periods);
                match step_position(t, horizon, n_periods) {
                    StepPosition::Node(_) => 0.0,
                    StepPosition::Interior(k) => q0 * (t / horizon - k as f64 / n - 0.5 / n),
                }
            }
            Self::SampledRate { q0, ref rates, ref cumulative, sample_step, .. } => {
                let (i, tau) = sample_cell(t, sample_step, rates.len());
                let slope = (rates[i + 1] - rates[i]) / sample_step;
                q0 + cumulative[i] + tau * rates[i] + 0.5 * slope * tau * tau
            }
        })
    }

    /// Target trading rate `R'(t)`.
    ///
    /// The step and sawtooth variants jump and carry no classical rate:
    /// [`Error::NotDifferentiable`].
    pub fn target_rate(&self, t: f64) -> Result<f64> {
        let t = self.clamp_time(t)?;
        Ok(match *self {
            Self::DTwap { q0, horizon } => -q0 / horizon,
            Self::Cosine { q0, horizon, n_periods, amplitude } => {
                let omega = 2.0 * std::f64::consts::PI * f64::from(n_periods) / horizon;
                -q0 / horizon + amplitude * omega * (omega * t).cos()
            }
            Self::TwapStep { .. } => {
                return Err(Error::NotDifferentiable(
                    "step schedule jumps at period boundaries".into(),
                ))
            }
            Self::TwapResidual { .. } => {
                return Err(Error::NotDifferentiable(
                    "sawtooth residual jumps at period boundaries".into(),
                ))
            }
            Self::SampledRate { ref rates, sample_step, .. } => {
                let (i, tau) = sample_cell(t, sample_step, rates.len());
                let w = tau / sample_step;
                rates[i] * (1.0 - w) + rates[i + 1] * w
            }
        })
    }

    /// Mean-zero periodic part of the schedule around the straight line
    /// `q0 * (1 - t/T)`:
    ///
    /// * `DTwap` → the zero schedule,
    /// * `Cosine` → the bare sinusoid,
    /// * `TwapStep` → the sawtooth residual,
    /// * `TwapResidual` → itself,
    /// * `SampledRate` → [`Error::NotPeriodic`] (no closed periodic form).
    pub fn periodic_residual(&self) -> Result<TargetStrategy> {
        Ok(match *self {
            Self::DTwap { horizon, .. } => Self::DTwap { q0: 0.0, horizon },
            Self::Cosine { horizon, n_periods, amplitude, .. } => {
                Self::Cosine { q0: 0.0, horizon, n_periods, amplitude }
            }
            Self::TwapStep { q0, horizon, n_periods } => {
                Self::TwapResidual { q0, horizon, n_periods }
            }
            Self::TwapResidual { .. } => self.clone(),
            Self::SampledRate { .. } => {
                return Err(Error::NotPeriodic(
                    "sampled-rate schedules carry no closed periodic decomposition".into(),
                ))
            }
        })
    }

    /// Value of a mean-zero periodic residual on the closed first period
    /// `[0, p]`, using one-sided limits at the period ends (the sawtooth is
    /// `-q0/(2n) + q0 tau / T` including `tau = 0` and `tau = p`).
    ///
    /// Only meaningful for residual-shaped strategies; used by the
    /// matrix-exponential oracle, whose quadrature needs the smooth branch
    /// rather than the pointwise jump-time values.
    pub(crate) fn residual_branch(&self, tau: f64) -> f64 {
        match *self {
            Self::DTwap { q0, horizon } => q0 * (1.0 - tau / horizon),
            Self::Cosine { q0, horizon, n_periods, amplitude } => {
                let omega = 2.0 * std::f64::consts::PI * f64::from(n_periods) / horizon;
                q0 * (1.0 - tau / horizon) + amplitude * (omega * tau).sin()
            }
            Self::TwapResidual { q0, horizon, n_periods } => {
                let n = f64::from(n_periods);
                q0 * (tau / horizon - 0.5 / n)
            }
            // Not periodic; the oracle rejects these before sampling.
            Self::TwapStep { .. } | Self::SampledRate { .. } => f64::NAN,
        }
    }
}

/// Where a time falls relative to the `n` period boundaries of `[0, T]`.
enum StepPosition {
    /// Within `1e-9` (relative) of boundary `k`, `k = 0..=n`.
    Node(u32),
    /// Strictly inside the open interval `(k p, (k+1) p)`.
    Interior(u32),
}

fn step_position(t: f64, horizon: f64, n_periods: u32) -> StepPosition {
    let s = t / horizon * f64::from(n_periods);
    let k = s.round();
    if (s - k).abs() <= TIME_EPS * s.abs().max(1.0) {
        StepPosition::Node(k as u32)
    } else {
        StepPosition::Interior(s.floor() as u32)
    }
}

/// Sample-cell lookup for `SampledRate`: index of the cell containing `t` and
/// the offset into it, with the final node folded into the last cell.
fn sample_cell(t: f64, sample_step: f64, n_samples: usize) -> (usize, f64) {
    let mut i = (t / sample_step).floor() as usize;
    if i >= n_samples - 1 {
        i = n_samples - 2;
    }
    (i, t - i as f64 * sample_step)
}

/// Uniform time grid over `[0, t_end]` with `n_mesh` cells (`n_mesh + 1`
/// nodes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    t_end: f64,
    n_mesh: usize,
    h: f64,
}

impl Grid {
    /// Grid with a prescribed number of cells; the step is `t_end / n_mesh`.
    pub fn from_parts(t_end: f64, n_mesh: usize) -> Result<Self> {
        if !t_end.is_finite() || t_end <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "grid horizon must be strictly positive, got {t_end}"
            )));
        }
        if n_mesh < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least two cells, got {n_mesh}"
            )));
        }
        Ok(Self { t_end, n_mesh, h: t_end / n_mesh as f64 })
    }

    /// Grid with a prescribed step; `t_end / h` must be an integer to one part
    /// in `1e12`, otherwise [`Error::GridMismatch`].
    pub fn with_step(t_end: f64, h: f64) -> Result<Self> {
        if !t_end.is_finite() || t_end <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "grid horizon must be strictly positive, got {t_end}"
            )));
        }
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "grid step must be strictly positive, got {h}"
            )));
        }
        let n = (t_end / h).round();
        if n < 2.0 || (n * h - t_end).abs() > 1e-12 * t_end.abs().max(1.0) {
            return Err(Error::GridMismatch(format!(
                "step {h} does not divide the horizon {t_end}"
            )));
        }
        Ok(Self { t_end, n_mesh: n as usize, h })
    }

    /// End of the grid (the horizon it spans).
    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// Number of cells.
    pub fn n_mesh(&self) -> usize {
        self.n_mesh
    }

    /// Number of nodes (`n_mesh + 1`).
    pub fn num_nodes(&self) -> usize {
        self.n_mesh + 1
    }

    /// Mesh width.
    pub fn step(&self) -> f64 {
        self.h
    }

    /// `i`-th node; the final node is exactly `t_end`.
    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i <= self.n_mesh, "node index out of range");
        if i == self.n_mesh {
            self.t_end
        } else {
            i as f64 * self.h
        }
    }

    /// All nodes as a vector.
    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n_mesh).map(|i| self.node(i)).collect()
    }
}

/// A scalar function sampled on the nodes of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFn {
    /// Wraps node values, checking the length against the grid.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_nodes() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid with {} nodes",
                values.len(),
                grid.num_nodes()
            )));
        }
        Ok(Self { grid, values })
    }

    /// The grid the values live on.
    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Node values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Consumes the function, returning its node values.
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Maximum absolute node value.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    /// Maximum absolute node-wise difference; the grids must agree.
    pub fn sup_diff(&self, other: &GridFn) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("cannot compare functions on different grids".into()));
        }
        Ok(self.values.iter().zip(&other.values).fold(0.0f64, |m, (&x, &y)| m.max((x - y).abs())))
    }
}

/// Outcome of the well-posedness check in [`validate_params`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// Whether a witness satisfying all four inequalities was found.
    pub feasible: bool,
    /// The witness `(theta1, theta2, theta3)` when feasible.
    pub witness: Option<(f64, f64, f64)>,
    /// Slacks of the four inequalities at the witness (all strictly positive
    /// when feasible): `theta2 - lambda0/2`, the harmonic-mean gap
    /// `1/(1/theta1 + 1/theta3) - lambda/2`, the scaled gap
    /// `8 phi0 a - lambda theta1`, and
    /// `8 phi - (lambda0/a0) theta2 - (lambda/a) theta3`.
    pub margins: Option<[f64; 4]>,
}

/// Sufficient condition for the game to admit a unique open-loop equilibrium:
/// existence of `theta1, theta2, theta3 > 0` with
///
/// ```text
/// theta2 > lambda0 / 2,
/// 1 / (1/theta1 + 1/theta3) > lambda / 2,
/// theta1 < 8 phi0 a / lambda,
/// (lambda0/a0) theta2 + (lambda/a) theta3 < 8 phi.
/// ```
///
/// The search walks the corner of the feasible box where the constraints are
/// loosest (`theta2` just above `lambda0/2`, `theta1`/`theta3` just below
/// their caps) and verifies each inequality directly at the candidate, so a
/// reported witness is always a genuine one. A `feasible: false` report means
/// the sufficient condition fails, not that no equilibrium exists.
pub fn validate_params(params: &MarketParams) -> ValidationReport {
    let p = params;
    // Upper end of the theta2 scan: inequality 4 with theta3 -> 0 caps
    // theta2 at 8 phi a0 / lambda0; unconstrained when lambda0 = 0.
    let th2_floor = 0.5 * p.lambda0;
    let th2_cap = if p.lambda0 > 0.0 { 8.0 * p.phi * p.a0 / p.lambda0 } else { th2_floor + 1.0 };
    let th1_cap = if p.lambda > 0.0 { 8.0 * p.phi0 * p.a / p.lambda } else { 1.0 };

    // Shrink towards the loosest corner; early entries give comfortable
    // margins, later ones rescue nearly-degenerate parameter sets.
    const SHRINK: [f64; 10] = [0.5, 0.25, 0.1, 0.05, 0.01, 3e-3, 1e-3, 1e-4, 1e-6, 1e-8];
    for &s in &SHRINK {
        let th2 = th2_floor + s * (th2_cap - th2_floor);
        let th3 = if p.lambda > 0.0 {
            (1.0 - s) * (8.0 * p.phi - p.lambda0 / p.a0 * th2) * p.a / p.lambda
        } else {
            1.0
        };
        let th1 = if p.lambda > 0.0 { (1.0 - s) * th1_cap } else { 1.0 };
        if !(th1 > 0.0 && th2 > 0.0 && th3 > 0.0) {
            continue;
        }
        let margins = inequality_margins(p, th1, th2, th3);
        if margins.iter().all(|&m| m > 0.0) {
            return ValidationReport {
                feasible: true,
                witness: Some((th1, th2, th3)),
                margins: Some(margins),
            };
        }
    }
    ValidationReport { feasible: false, witness: None, margins: None }
}

/// Slack of each of the four sufficient-condition inequalities at a candidate
/// witness (positive means satisfied).
fn inequality_margins(p: &MarketParams, th1: f64, th2: f64, th3: f64) -> [f64; 4] {
    [
        th2 - 0.5 * p.lambda0,
        1.0 / (1.0 / th1 + 1.0 / th3) - 0.5 * p.lambda,
        8.0 * p.phi0 * p.a - p.lambda * th1,
        8.0 * p.phi - p.lambda0 / p.a0 * th2 - p.lambda / p.a * th3,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn preset_params() -> MarketParams {
        MarketParams::new(0.001, 0.001, 0.01, 0.005, 0.1, 0.01, 0.1, 10.0).unwrap()
    }

    #[test]
    fn params_reject_nonpositive_impact() {
        assert!(MarketParams::new(0.0, 0.001, 0.01, 0.005, 0.1, 0.01, 0.1, 10.0).is_err());
        assert!(MarketParams::new(0.001, -1.0, 0.01, 0.005, 0.1, 0.01, 0.1, 10.0).is_err());
        assert!(MarketParams::new(0.001, 0.001, -0.01, 0.005, 0.1, 0.01, 0.1, 10.0).is_err());
        assert!(MarketParams::new(0.001, 0.001, 0.01, 0.005, 0.1, 0.01, 0.1, 0.0).is_err());
    }

    #[test]
    fn d_twap_inventory_is_linear() {
        let r = TargetStrategy::d_twap(10.0, 10.0).unwrap();
        assert_eq!(r.target_inventory(5.0).unwrap(), 5.0);
        assert_eq!(r.target_inventory(0.0).unwrap(), 10.0);
        assert_eq!(r.target_inventory(10.0).unwrap(), 0.0);
        assert_eq!(r.target_rate(3.3).unwrap(), -1.0);
    }

    #[test]
    fn cosine_inventory_matches_hand_value() {
        let b = 0.5 / std::f64::consts::PI;
        let r = TargetStrategy::cosine(10.0, 10.0, 10, b).unwrap();
        // t = 0.25 sits at a quarter of the first oscillation: sin = 1.
        let got = r.target_inventory(0.25).unwrap();
        assert!((got - (9.75 + b)).abs() < 1e-12, "got {got}");
        // The sinusoid's slope cancels the line at t = 0 for this amplitude.
        assert!(r.target_rate(0.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn step_schedule_takes_midpoint_values_at_jumps() {
        let r = TargetStrategy::twap_step(10.0, 10.0, 10).unwrap();
        assert_eq!(r.target_inventory(0.5).unwrap(), 9.5);
        assert_eq!(r.target_inventory(0.0).unwrap(), 10.0);
        assert_eq!(r.target_inventory(1.0).unwrap(), 9.0);
        assert_eq!(r.target_inventory(10.0).unwrap(), 0.0);
        assert!(matches!(r.target_rate(0.5), Err(Error::NotDifferentiable(_))));
    }

    #[test]
    fn sawtooth_residual_matches_hand_values() {
        let r = TargetStrategy::twap_residual(10.0, 10.0, 10).unwrap();
        assert!((r.target_inventory(0.25).unwrap() + 0.25).abs() < 1e-12);
        assert_eq!(r.target_inventory(1.0).unwrap(), 0.0);
        assert!((r.target_inventory(0.95).unwrap() - 0.45).abs() < 1e-12);
        assert_eq!(r.q0(), 0.0, "residuals carry no net turnover");
    }

    #[test]
    fn residuals_are_step_minus_line() {
        let step = TargetStrategy::twap_step(10.0, 10.0, 10).unwrap();
        let line = TargetStrategy::d_twap(10.0, 10.0).unwrap();
        let saw = step.periodic_residual().unwrap();
        for i in 0..=1000 {
            let t = 10.0 * i as f64 / 1000.0;
            let lhs = saw.target_inventory(t).unwrap();
            let rhs = step.target_inventory(t).unwrap() - line.target_inventory(t).unwrap();
            assert!((lhs - rhs).abs() < 1e-12, "t = {t}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn periodic_residual_maps_each_variant() {
        let line = TargetStrategy::d_twap(10.0, 10.0).unwrap();
        assert_eq!(line.periodic_residual().unwrap().q0(), 0.0);

        let cosine = TargetStrategy::cosine(10.0, 10.0, 10, 0.2).unwrap();
        match cosine.periodic_residual().unwrap() {
            TargetStrategy::Cosine { q0, n_periods, amplitude, .. } => {
                assert_eq!(q0, 0.0);
                assert_eq!(n_periods, 10);
                assert_eq!(amplitude, 0.2);
            }
            other => panic!("expected a bare sinusoid, got {other:?}"),
        }

        let sampled = TargetStrategy::sampled_rate(10.0, 10.0, vec![-1.0; 101]).unwrap();
        assert!(matches!(sampled.periodic_residual(), Err(Error::NotPeriodic(_))));
    }

    #[test]
    fn sampled_rate_constant_is_a_line() {
        let r = TargetStrategy::sampled_rate(10.0, 10.0, vec![-1.0; 101]).unwrap();
        for i in 0..=40 {
            let t = 0.25 * i as f64;
            assert!((r.target_inventory(t).unwrap() - (10.0 - t)).abs() < 1e-12);
            assert!((r.target_rate(t).unwrap() + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_rate_rejects_non_liquidating_schedules() {
        let got = TargetStrategy::sampled_rate(10.0, 10.0, vec![-0.9; 101]);
        assert!(matches!(got, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn times_outside_horizon_are_rejected() {
        let r = TargetStrategy::d_twap(10.0, 10.0).unwrap();
        assert!(matches!(r.target_inventory(-0.1), Err(Error::OutOfDomain { .. })));
        assert!(matches!(r.target_inventory(10.1), Err(Error::OutOfDomain { .. })));
        // A rounding-level overshoot of the boundary is clamped, not rejected.
        assert_eq!(r.target_inventory(10.0 + 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn grid_constructors_agree() {
        let g1 = Grid::from_parts(10.0, 10_000).unwrap();
        let g2 = Grid::with_step(10.0, 0.001).unwrap();
        assert_eq!(g1.n_mesh(), g2.n_mesh());
        assert_eq!(g1.num_nodes(), 10_001);
        assert_eq!(g1.node(10_000), 10.0, "last node is exactly the horizon");
        assert!(Grid::with_step(10.0, 0.0003).is_err(), "step must divide the horizon");
    }

    #[test]
    fn grid_fn_checks_lengths_and_compares() {
        let g = Grid::from_parts(1.0, 4).unwrap();
        assert!(GridFn::new(g, vec![0.0; 4]).is_err());
        let f = GridFn::new(g, vec![1.0, -2.0, 0.5, 0.0, 3.0]).unwrap();
        assert_eq!(f.sup_norm(), 3.0);
        let g2 = Grid::from_parts(1.0, 5).unwrap();
        let f2 = GridFn::new(g2, vec![0.0; 6]).unwrap();
        assert!(f.sup_diff(&f2).is_err(), "different grids must not compare");
    }

    #[test]
    fn preset_parameters_are_feasible_with_verified_witness() {
        let report = validate_params(&preset_params());
        assert!(report.feasible);
        let (th1, th2, th3) = report.witness.expect("feasible report carries a witness");
        let p = preset_params();
        // Re-derive the four inequalities directly.
        assert!(th2 > 0.5 * p.lambda0);
        assert!(1.0 / (1.0 / th1 + 1.0 / th3) > 0.5 * p.lambda);
        assert!(th1 < 8.0 * p.phi0 * p.a / p.lambda);
        assert!(p.lambda0 / p.a0 * th2 + p.lambda / p.a * th3 < 8.0 * p.phi);
        let margins = report.margins.unwrap();
        assert!(margins.iter().all(|&m| m > 0.0), "margins {margins:?}");
    }

    #[test]
    fn strong_major_impact_is_infeasible() {
        // lambda0^2 far above 16 a0 phi leaves no room for theta2.
        let p = MarketParams::new(0.001, 0.001, 10.0, 0.005, 0.1, 0.01, 0.1, 10.0).unwrap();
        let report = validate_params(&p);
        assert!(!report.feasible);
        assert!(report.witness.is_none());
    }

    #[test]
    fn interaction_free_params_are_always_feasible() {
        let p = MarketParams::new(0.5, 2.0, 0.0, 0.0, 3.0, 0.25, 0.0, 1.0).unwrap();
        assert!(validate_params(&p).feasible);
    }

    proptest! {
        /// The sinusoid residual is exactly the schedule minus the line.
        #[test]
        fn cosine_residual_identity(t in 0.0..10.0f64) {
            let cosine = TargetStrategy::cosine(10.0, 10.0, 7, 0.3).unwrap();
            let line = TargetStrategy::d_twap(10.0, 10.0).unwrap();
            let residual = cosine.periodic_residual().unwrap();
            let lhs = residual.target_inventory(t).unwrap();
            let rhs = cosine.target_inventory(t).unwrap() - line.target_inventory(t).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        /// Permanent impacts well below the penalty/temporary-impact scale
        /// always pass the sufficient condition, and the reported witness
        /// satisfies the raw inequalities.
        #[test]
        fn validation_accepts_weak_interactions(
            lambda0 in 0.0..0.01f64,
            lambda in 0.0..0.003f64,
        ) {
            let p = MarketParams::new(0.001, 0.001, lambda0, lambda, 0.1, 0.01, 0.1, 10.0)
                .unwrap();
            let report = validate_params(&p);
            // Interactions this weak relative to phi/a are always admissible.
            prop_assert!(report.feasible);
            if let Some((th1, th2, th3)) = report.witness {
                prop_assert!(th2 > 0.5 * p.lambda0);
                prop_assert!(1.0 / (1.0 / th1 + 1.0 / th3) > 0.5 * p.lambda);
                prop_assert!(8.0 * p.phi0 * p.a - p.lambda * th1 > 0.0);
                prop_assert!(p.lambda0 / p.a0 * th2 + p.lambda / p.a * th3 < 8.0 * p.phi);
            }
        }
    }
}
