//! Explicit solutions used as independent oracles: the interaction-free
//! benchmark strategies and the single-harmonic response of the equilibrium's
//! periodic component.
//!
//! # Interaction-free benchmark
//!
//! With the cross impacts switched off, the major's optimal inventory solves
//! `a0 Q'' = phi0 (Q - R)` with `Q(0) = q0`, `Q(T) = 0`, which has the
//! Green-kernel representation (theta0 = sqrt(phi0/a0))
//!
//! ```text
//! Q(t) = q0 sinh(theta0 (T-t)) / sinh(theta0 T)
//!      + theta0 ∫_0^T R(s) sinh(theta0 min(s,t)) sinh(theta0 (T - max(s,t)))
//!                     / sinh(theta0 T) ds,
//! ```
//!
//! and the minor's optimum is the pure exponential decay
//! `Q(t) = q0 exp(-lambda t / (4a)) sinh(gamma (T-t)) / sinh(gamma T)` with
//! `gamma = sqrt(phi/a + lambda^2/(16 a^2))`. Both are evaluated in
//! negative-exponent form so large `theta T` cannot overflow.
//!
//! # Harmonic response
//!
//! For a mean-zero residual `b sin(omega t)` with `omega = 2 pi n / T`, the
//! periodic components of the equilibrium are single harmonics whose
//! coefficients follow from substituting `A sin + B cos` into the coupled
//! periodic system; [`cosine_periodic_components`] returns them together with
//! the derived amplitude/phase and price summaries.

use crate::error::{Error, Result};
use crate::model::{Grid, GridFn, MarketParams, TargetStrategy};

/// Decay rates of the interaction-free strategies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoGameConstants {
    /// Major tracking rate `sqrt(phi0 / a0)` (1/time).
    pub theta0: f64,
    /// Minor penalty rate `sqrt(phi / a)` (1/time).
    pub theta: f64,
    /// Minor effective decay `sqrt(phi/a + lambda^2 / (16 a^2))` (1/time).
    pub gamma: f64,
}

/// Decay rates entering the interaction-free closed forms.
pub fn no_game_constants(params: &MarketParams) -> NoGameConstants {
    NoGameConstants {
        theta0: (params.phi0 / params.a0).sqrt(),
        theta: (params.phi / params.a).sqrt(),
        gamma: (params.phi / params.a + params.lambda.powi(2) / (16.0 * params.a * params.a))
            .sqrt(),
    }
}

/// `sinh(r (t_end - t)) / sinh(r t_end)` in overflow-safe form.
fn decay_ratio(r: f64, t: f64, t_end: f64) -> f64 {
    ((-r * t).exp() - (-r * (2.0 * t_end - t)).exp()) / (1.0 - (-2.0 * r * t_end).exp())
}

/// Interaction-free optimal major inventory on `grid`, tracking `target`.
///
/// The Green-kernel integral is evaluated by the composite trapezoid rule on
/// the grid nodes, so the cost is quadratic in the node count; the kernel's
/// slope kink at `s = t` always falls on a node, preserving second-order
/// accuracy.
pub fn no_interaction_major(
    params: &MarketParams,
    q0_major: f64,
    target: &TargetStrategy,
    grid: &Grid,
) -> Result<GridFn> {
    let th = no_game_constants(params).theta0;
    let t_end = grid.t_end();
    let h = grid.step();
    let n = grid.num_nodes();
    let r: Vec<f64> =
        (0..n).map(|j| target.target_inventory(grid.node(j))).collect::<Result<_>>()?;
    // Shared denominator of the kernel and the boundary ratio.
    let denom = 1.0 - (-2.0 * th * t_end).exp();

    let mut q = Vec::with_capacity(n);
    for i in 0..n {
        let t = grid.node(i);
        let mut integral = 0.0;
        for (j, &rj) in r.iter().enumerate() {
            let s = grid.node(j);
            let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
            // sinh(th lo) sinh(th (T - hi)) / sinh(th T), expanded into pure
            // negative exponents.
            let kernel = 0.5
                * ((-th * (hi - lo)).exp()
                    - (-th * (2.0 * t_end - hi - lo)).exp()
                    - (-th * (hi + lo)).exp()
                    + (-th * (2.0 * t_end - hi + lo)).exp())
                / denom;
            let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            integral += w * rj * kernel;
        }
        q.push(q0_major * decay_ratio(th, t, t_end) + th * h * integral);
    }
    GridFn::new(*grid, q)
}

/// Interaction-free optimal minor inventory on `grid` from initial position
/// `q0_minor`.
pub fn no_interaction_minor(params: &MarketParams, q0_minor: f64, grid: &Grid) -> GridFn {
    let gamma = no_game_constants(params).gamma;
    let decay = params.lambda / (4.0 * params.a);
    let t_end = grid.t_end();
    let values = (0..grid.num_nodes())
        .map(|i| {
            let t = grid.node(i);
            q0_minor * (-decay * t).exp() * decay_ratio(gamma, t, t_end)
        })
        .collect();
    GridFn::new(*grid, values).expect("values built on the same grid")
}

/// Single-harmonic response of the equilibrium's periodic components to the
/// residual `b sin(omega t)`.
///
/// The periodic inventories are `major_sin * sin(omega t) + major_cos *
/// cos(omega t)` (and likewise for the minor); the auxiliary constants are the
/// harmonic impedances of the two Euler–Lagrange equations and their coupling
/// strengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicCoeffs {
    /// Angular frequency `2 pi n / T` (1/time).
    pub omega: f64,
    /// Major impedance `a0 omega^2 + phi0`.
    pub d0: f64,
    /// Minor impedance `a omega^2 + phi`.
    pub d1: f64,
    /// Major-to-minor coupling `lambda0 omega / 2`.
    pub e0: f64,
    /// Minor self/cross coupling `lambda omega / 2`.
    pub e1: f64,
    /// Common denominator
    /// `d0^2 d1^2 + 2 d0 d1 e0 e1 + d0^2 e1^2 + e0^2 e1^2`.
    pub k_denom: f64,
    /// Major periodic inventory: coefficient of `sin(omega t)`.
    pub major_sin: f64,
    /// Major periodic inventory: coefficient of `cos(omega t)`.
    pub major_cos: f64,
    /// Minor periodic inventory: coefficient of `sin(omega t)`.
    pub minor_sin: f64,
    /// Minor periodic inventory: coefficient of `cos(omega t)`.
    pub minor_cos: f64,
}

impl HarmonicCoeffs {
    /// Major periodic inventory at time `t`.
    pub fn major_at(&self, t: f64) -> f64 {
        self.major_sin * (self.omega * t).sin() + self.major_cos * (self.omega * t).cos()
    }

    /// Minor periodic inventory at time `t`.
    pub fn minor_at(&self, t: f64) -> f64 {
        self.minor_sin * (self.omega * t).sin() + self.minor_cos * (self.omega * t).cos()
    }

    /// Major periodic trading rate at time `t`.
    pub fn major_rate_at(&self, t: f64) -> f64 {
        self.omega
            * (self.major_sin * (self.omega * t).cos() - self.major_cos * (self.omega * t).sin())
    }

    /// Minor periodic trading rate at time `t`.
    pub fn minor_rate_at(&self, t: f64) -> f64 {
        self.omega
            * (self.minor_sin * (self.omega * t).cos() - self.minor_cos * (self.omega * t).sin())
    }
}

/// Harmonic coefficients of the periodic equilibrium components for a
/// sinusoidal residual with `n_periods` oscillations and amplitude `b`.
pub fn cosine_periodic_components(params: &MarketParams, n_periods: u32, b: f64) -> HarmonicCoeffs {
    let p = params;
    let omega = 2.0 * std::f64::consts::PI * f64::from(n_periods) / p.horizon;
    let d0 = p.a0 * omega * omega + p.phi0;
    let d1 = p.a * omega * omega + p.phi;
    let e0 = 0.5 * p.lambda0 * omega;
    let e1 = 0.5 * p.lambda * omega;
    let k_denom =
        d0 * d0 * d1 * d1 + 2.0 * d0 * d1 * e0 * e1 + d0 * d0 * e1 * e1 + e0 * e0 * e1 * e1;
    let scale = b * p.phi0 / k_denom;
    HarmonicCoeffs {
        omega,
        d0,
        d1,
        e0,
        e1,
        k_denom,
        major_sin: scale * (d0 * d1 * d1 + d1 * e0 * e1 + d0 * e1 * e1),
        major_cos: -scale * e0 * e1 * e1,
        minor_sin: -scale * d0 * e0 * e1,
        minor_cos: scale * e0 * (d0 * d1 + e0 * e1),
    }
}

/// Amplitude (non-negative) and phase of a single harmonic written as
/// `amplitude * cos(omega t - phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePhase {
    /// Peak size of the harmonic.
    pub amplitude: f64,
    /// Phase lag in radians.
    pub phase: f64,
}

/// Amplitudes and phases of the periodic trading rates, plus the
/// interaction-free major amplitude they are dominated by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateHarmonics {
    /// Major periodic trading rate.
    pub major: AmplitudePhase,
    /// Minor periodic trading rate.
    pub minor: AmplitudePhase,
    /// Interaction-free major rate amplitude `b phi0 omega / d0`.
    pub major_no_interaction: f64,
}

/// Amplitude/phase form of the periodic trading rates for a sinusoidal
/// residual.
///
/// The major's rate is `A cos(omega t - phase)` with `phase in [0, pi/2]`;
/// the minor's phase lies in `[-pi, -pi/2]`. Fails with
/// [`Error::DegeneratePhase`] when a component vanishes identically
/// (`b = 0`, or `lambda0 = 0` which silences the minor).
pub fn rate_amplitude_phase(
    params: &MarketParams,
    n_periods: u32,
    b: f64,
) -> Result<RateHarmonics> {
    if b == 0.0 {
        return Err(Error::DegeneratePhase("zero residual amplitude".into()));
    }
    if params.lambda0 == 0.0 {
        return Err(Error::DegeneratePhase(
            "lambda0 = 0 leaves the minor's periodic rate identically zero".into(),
        ));
    }
    let c = cosine_periodic_components(params, n_periods, b);
    // v = omega (s cos - c sin) = A cos(omega t - phase) with
    // A cos(phase) = omega s and A sin(phase) = -omega c.
    let major = AmplitudePhase {
        amplitude: c.omega * c.major_sin.hypot(c.major_cos),
        phase: (-c.major_cos).atan2(c.major_sin),
    };
    let minor = AmplitudePhase {
        amplitude: c.omega * c.minor_sin.hypot(c.minor_cos),
        phase: (-c.minor_cos).atan2(c.minor_sin),
    };
    Ok(RateHarmonics { major, minor, major_no_interaction: b * params.phi0 * c.omega / c.d0 })
}

/// Peak-to-midline amplitude of the periodic price component for a sinusoidal
/// residual: `(equilibrium, no_interaction)`.
///
/// The equilibrium price harmonic is `lambda0 * major + lambda * minor`,
/// whose amplitude collapses to `2 b phi0 d1 e0 / (omega sqrt(K))`; without
/// interactions it is `lambda0 b phi0 / d0`.
pub fn price_periodic_amplitude(params: &MarketParams, n_periods: u32, b: f64) -> (f64, f64) {
    let c = cosine_periodic_components(params, n_periods, b);
    let equilibrium = 2.0 * b * params.phi0 * c.d1 * c.e0 / (c.omega * c.k_denom.sqrt());
    let no_interaction = 2.0 * b * params.phi0 * c.e0 / (c.omega * c.d0);
    (equilibrium, no_interaction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MarketParams;
    use proptest::prelude::*;

    fn preset() -> MarketParams {
        MarketParams::new(0.001, 0.001, 0.01, 0.005, 0.1, 0.01, 0.1, 10.0).unwrap()
    }

    const B: f64 = 0.5 / std::f64::consts::PI;

    #[test]
    fn harmonic_constants_match_frozen_values() {
        let c = cosine_periodic_components(&preset(), 10, B);
        assert!((c.omega - std::f64::consts::TAU).abs() < 1e-15);
        assert!((c.d0 - 0.13947841760435745).abs() < 1e-15);
        assert!((c.d1 - 0.049478417604357436).abs() < 1e-15);
        assert!((c.e0 - 0.031415926535897934).abs() < 1e-15);
        assert!((c.e1 - 0.015707963267948967).abs() < 1e-15);
        assert!((c.k_denom - 5.9481011077177006e-5).abs() < 1e-18);
        assert!((c.major_sin - 0.10710682860111564).abs() < 1e-13);
        assert!((c.major_cos + 0.002074108236888299).abs() < 1e-15);
        assert!((c.minor_sin + 0.018416985696142238).abs() < 1e-14);
        assert!((c.minor_cos - 0.062159767286766664).abs() < 1e-14);
    }

    #[test]
    fn rate_and_price_summaries_match_frozen_values() {
        let r = rate_amplitude_phase(&preset(), 10, B).unwrap();
        assert!((r.major.amplitude - 0.6730982213969732).abs() < 1e-12);
        assert!((r.minor.amplitude - 0.40734341648179845).abs() < 1e-12);
        assert!((r.major.phase - 0.019362435247196615).abs() < 1e-12);
        assert!((r.minor.phase + 1.8588410792969807).abs() < 1e-12);
        assert!((r.major_no_interaction - 0.7169568003248976).abs() < 1e-12);

        let (eq, ng) = price_periodic_amplitude(&preset(), 10, B);
        assert!((eq - 0.0010210494184978449).abs() < 1e-15);
        assert!((ng - 0.0011410721875505646).abs() < 1e-15);
    }

    #[test]
    fn phases_sit_in_their_quadrants_and_amplitudes_are_dominated() {
        let r = rate_amplitude_phase(&preset(), 10, B).unwrap();
        assert!(r.major.phase >= 0.0 && r.major.phase <= std::f64::consts::FRAC_PI_2);
        assert!(r.minor.phase >= -std::f64::consts::PI);
        assert!(r.minor.phase <= -std::f64::consts::FRAC_PI_2);
        assert!(r.major.phase - r.minor.phase <= std::f64::consts::PI);
        assert!(r.major.amplitude <= r.major_no_interaction);
        let (eq, ng) = price_periodic_amplitude(&preset(), 10, B);
        assert!(eq <= ng);
    }

    #[test]
    fn degenerate_phases_are_rejected() {
        assert!(matches!(rate_amplitude_phase(&preset(), 10, 0.0), Err(Error::DegeneratePhase(_))));
        let no_major_impact =
            MarketParams::new(0.001, 0.001, 0.0, 0.005, 0.1, 0.01, 0.1, 10.0).unwrap();
        assert!(matches!(
            rate_amplitude_phase(&no_major_impact, 10, B),
            Err(Error::DegeneratePhase(_))
        ));
    }

    #[test]
    fn zero_minor_impact_keeps_minor_response_alive() {
        // lambda = 0 decouples the major but the minor still reacts to it.
        let p = MarketParams::new(0.001, 0.001, 0.01, 0.0, 0.1, 0.01, 0.1, 10.0).unwrap();
        let c = cosine_periodic_components(&p, 10, B);
        assert_eq!(c.major_cos, 0.0);
        assert!((c.major_sin - B * p.phi0 / c.d0).abs() < 1e-15, "pure in-phase tracking");
        assert_eq!(c.minor_sin, 0.0);
        let expect = B * p.phi0 * c.e0 / (c.d0 * c.d1);
        assert!((c.minor_cos - expect).abs() < 1e-15, "minor response must survive lambda = 0");
    }

    #[test]
    fn zero_major_impact_silences_minor_component() {
        let p = MarketParams::new(0.001, 0.001, 0.0, 0.005, 0.1, 0.01, 0.1, 10.0).unwrap();
        let c = cosine_periodic_components(&p, 10, B);
        assert_eq!(c.minor_sin, 0.0);
        assert_eq!(c.minor_cos, 0.0);
    }

    /// Sup error of the Green-kernel quadrature against an exact solution.
    fn kernel_sup_error(
        p: &MarketParams,
        target: &TargetStrategy,
        n_mesh: usize,
        exact: impl Fn(f64) -> f64,
    ) -> f64 {
        let grid = Grid::from_parts(10.0, n_mesh).unwrap();
        let q = no_interaction_major(p, 10.0, target, &grid).unwrap();
        q.values()
            .iter()
            .enumerate()
            .map(|(i, &qi)| (qi - exact(grid.node(i))).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn interaction_free_major_reproduces_straight_line_target() {
        // With R matching q0, the tracking solution is exactly the line.
        // The quadrature error scales as (theta0 h)^2 near the endpoints;
        // halving h must cut the sup error about fourfold.
        let p = preset();
        let target = TargetStrategy::d_twap(10.0, 10.0).unwrap();
        let exact = |t: f64| 10.0 * (1.0 - t / 10.0);
        let coarse = kernel_sup_error(&p, &target, 400, exact);
        let fine = kernel_sup_error(&p, &target, 800, exact);
        let h = 10.0 / 800.0;
        // Kink-term error bound: theta0^2 * R_max * h^2 / 12, with headroom.
        let envelope = (p.phi0 / p.a0) * 10.0 / 8.0 * h * h;
        assert!(fine < envelope, "sup error {fine} beyond trapezoid envelope {envelope}");
        assert!(coarse / fine > 3.0, "expected second-order decay, got ratio {}", coarse / fine);
    }

    #[test]
    fn interaction_free_major_matches_cosine_closed_form() {
        // For the sinusoidal target the solution is the line plus the scaled
        // sinusoid phi0 b / d0 sin(omega t), with no boundary correction.
        let p = preset();
        let target = TargetStrategy::cosine(10.0, 10.0, 10, B).unwrap();
        let c = cosine_periodic_components(&p, 10, B);
        let gain = p.phi0 * B / c.d0;
        let exact = move |t: f64| 10.0 * (1.0 - t / 10.0) + gain * (c.omega * t).sin();
        let coarse = kernel_sup_error(&p, &target, 500, exact);
        let fine = kernel_sup_error(&p, &target, 1000, exact);
        let h = 10.0 / 1000.0;
        // Kink-term error bound: theta0^2 * R_max * h^2 / 12, with headroom.
        let envelope = (p.phi0 / p.a0) * 10.0 / 8.0 * h * h;
        assert!(fine < envelope, "sup error {fine} beyond trapezoid envelope {envelope}");
        assert!(coarse / fine > 3.0, "expected second-order decay, got ratio {}", coarse / fine);
    }

    #[test]
    fn interaction_free_minor_satisfies_its_ode() {
        // a Q'' + lambda/2 Q' - phi Q = 0 via centered differences, plus BCs.
        let p = preset();
        let grid = Grid::from_parts(10.0, 2000).unwrap();
        let q = no_interaction_minor(&p, 3.0, &grid);
        let v = q.values();
        let h = grid.step();
        assert!((v[0] - 3.0).abs() < 1e-12);
        assert!(v[grid.n_mesh()].abs() < 1e-12);
        let mut worst = 0.0f64;
        for i in 1..grid.n_mesh() {
            let d2 = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
            let d1 = (v[i + 1] - v[i - 1]) / (2.0 * h);
            worst = worst.max((p.a * d2 + 0.5 * p.lambda * d1 - p.phi * v[i]).abs());
        }
        assert!(worst < 1e-5, "ODE residual {worst} too large");
    }

    proptest! {
        /// The quartic denominator factors as a sum of two squares.
        #[test]
        fn k_denominator_identity(
            lambda0 in 0.0..0.05f64,
            lambda in 0.0..0.05f64,
            n in 1u32..40,
        ) {
            let p = MarketParams::new(0.001, 0.002, lambda0, lambda, 0.1, 0.01, 0.0, 10.0)
                .unwrap();
            let c = cosine_periodic_components(&p, n, 1.0);
            let other = (c.d0 * c.d1 + c.e0 * c.e1).powi(2) + (c.d0 * c.e1).powi(2);
            prop_assert!((c.k_denom - other).abs() <= 1e-12 * c.k_denom);
        }

        /// The harmonic coefficients satisfy both coupled periodic equations:
        /// a0 Q_mj'' - phi0 Q_mj + (lambda/2) Q_mn' = -phi0 b sin(omega t)
        /// a  Q_mn'' - phi  Q_mn + (lambda0/2) Q_mj' + (lambda/2) Q_mn' = 0.
        #[test]
        fn harmonics_satisfy_periodic_system(
            lambda0 in 0.0..0.05f64,
            lambda in 0.0..0.05f64,
            b in 0.01..2.0f64,
            t in 0.0..10.0f64,
            n in 1u32..20,
        ) {
            let p = MarketParams::new(0.001, 0.002, lambda0, lambda, 0.1, 0.01, 0.0, 10.0)
                .unwrap();
            let c = cosine_periodic_components(&p, n, b);
            let w2 = c.omega * c.omega;
            let major_res = -p.a0 * w2 * c.major_at(t) - p.phi0 * c.major_at(t)
                + 0.5 * p.lambda * c.minor_rate_at(t)
                + p.phi0 * b * (c.omega * t).sin();
            let minor_res = -p.a * w2 * c.minor_at(t) - p.phi * c.minor_at(t)
                + 0.5 * p.lambda0 * c.major_rate_at(t)
                + 0.5 * p.lambda * c.minor_rate_at(t);
            let scale = 1.0 + b * p.phi0;
            prop_assert!(major_res.abs() < 1e-10 * scale, "major residual {major_res}");
            prop_assert!(minor_res.abs() < 1e-10 * scale, "minor residual {minor_res}");
        }
    }
}
