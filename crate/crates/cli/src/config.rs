//! Experiment configurations: the TOML schema, staged validation, and
//! resolution into solver-ready model objects.
//!
//! A configuration file is a TOML document with the sections below. Only
//! `market`, `inventories`, and `target` are required; unknown keys anywhere
//! are rejected so typos cannot silently change an experiment.
//!
//! ```toml
//! output_dir = "runs/cosine"     # optional; default "." (--out overrides)
//!
//! [market]                       # all fields required
//! a0 = 1e-3                      # major temporary impact (cash·time/shares²)
//! a = 1e-3                       # minor temporary impact
//! lambda0 = 0.01                 # major permanent impact (cash/shares)
//! lambda = 0.005                 # minor permanent impact
//! phi0 = 0.1                     # major tracking penalty (cash/(shares²·time))
//! phi = 0.01                     # minor inventory penalty
//! sigma = 0.1                    # volatility (kept for completeness; the
//!                                # deterministic regime never reads it)
//! horizon = 10.0                 # trading horizon T (time)
//!
//! [inventories]
//! major = 10.0                   # shares
//! minor = 0.0
//!
//! [target]
//! kind = "cosine"                # dtwap | cosine | twap_step | twap_residual
//!                                # | sampled_rate
//! q0 = 10.0                      # optional; defaults to inventories.major
//! n_periods = 10                 # cosine / twap_step / twap_residual
//! amplitude = 0.159              # cosine only (shares)
//! rates = [-1.0, -1.0]           # sampled_rate only (shares/time, uniform in t)
//!
//! [grid]                         # optional; default h = 1e-3
//! h = 1e-3                       # step, or n_mesh = 10000 (exactly one)
//!
//! [options]                      # optional; all fields optional
//! max_iter = 200
//! tol = 1e-10
//! oracle_quadrature_steps = 100000
//!
//! [outputs]                      # optional
//! artifacts = ["trajectories", "decomposition", "costs", "amplitudes"]
//! nplayer = [2, 10, 100]         # population sizes for the gap report
//! ```
//!
//! Loading is staged so every failure carries a precise class:
//! [`ConfigError::Parse`] for unreadable files or TOML syntax errors,
//! [`ConfigError::Schema`] for unknown/missing/ill-typed keys (an empty file
//! is missing all required sections), and [`ConfigError::Domain`] for values
//! the model rejects. All three map to the same process exit code; the class
//! only shapes the diagnostic and tells the user where to look.

use std::fmt;
use std::path::{Path, PathBuf};

use liqgame_core::presets;
use liqgame_core::{Grid, Inventories, MarketParams, SolveOptions, TargetStrategy};
use serde::Deserialize;

/// Configuration failure classes, in the order they are checked.
#[derive(Debug)]
pub enum ConfigError {
    /// The file could not be read or is not syntactically valid TOML.
    Parse(String),
    /// The document shape is wrong: unknown, missing, or ill-typed keys.
    Schema(String),
    /// The values violate a model invariant (negative impacts, a grid that
    /// skips a step target's jump times, ...).
    Domain(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Parse(msg) => write!(f, "config parse error: {msg}"),
            Self::Schema(msg) => write!(f, "config schema error: {msg}"),
            Self::Domain(msg) => write!(f, "config domain error: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Wraps a model-constructor rejection as a domain-class failure.
fn domain(err: liqgame_core::Error) -> ConfigError {
    ConfigError::Domain(err.to_string())
}

/// A file family the pipeline can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Artifact {
    /// `trajectories.csv` and `trajectories_no_interaction.csv`.
    Trajectories,
    /// `decomposition.csv` — periodic/trend split (decomposable targets only).
    Decomposition,
    /// `costs.json` — both traders' cost breakdowns.
    Costs,
    /// `amplitudes.json` — periodic-component amplitudes.
    Amplitudes,
    /// `spectrum.csv` and `spectrum_price.csv` — Fourier mode magnitudes.
    Spectrum,
    /// `gap_report.json` — finite-population best-response gaps.
    Nplayer,
}

impl Artifact {
    fn parse(name: &str) -> Result<Self, ConfigError> {
        Ok(match name {
            "trajectories" => Self::Trajectories,
            "decomposition" => Self::Decomposition,
            "costs" => Self::Costs,
            "amplitudes" => Self::Amplitudes,
            "spectrum" => Self::Spectrum,
            "nplayer" => Self::Nplayer,
            other => {
                return Err(ConfigError::Schema(format!(
                    "unknown artifact `{other}` (expected trajectories, decomposition, costs, \
                     amplitudes, spectrum, or nplayer)"
                )))
            }
        })
    }
}

/// Population sizes reported when the configuration does not list any.
const DEFAULT_NPLAYER_SIZES: [usize; 3] = [2, 10, 100];

/// A fully resolved experiment: everything the pipelines need to solve and
/// emit artifacts.
#[derive(Debug)]
pub struct Experiment {
    /// Bundled preset name when the experiment came from `--preset`.
    pub preset: Option<String>,
    /// Market parameters.
    pub params: MarketParams,
    /// Initial inventories.
    pub inv: Inventories,
    /// The major trader's targeting strategy.
    pub target: TargetStrategy,
    /// Full-horizon solver grid.
    pub grid: Grid,
    /// Solver options (periodic relaxation and oracle quadrature).
    pub options: SolveOptions,
    /// Artifacts an end-to-end reproduction emits.
    pub artifacts: Vec<Artifact>,
    /// Minor-population sizes for the best-response gap report.
    pub nplayer_sizes: Vec<usize>,
    /// Directory artifacts are written into (created on demand).
    pub output_dir: PathBuf,
}

impl Experiment {
    /// Resolves a bundled preset, applying the command-line overrides.
    pub fn from_preset(
        name: &str,
        grid_h: Option<f64>,
        out: Option<PathBuf>,
    ) -> Result<Self, ConfigError> {
        let preset = presets::by_name(name).ok_or_else(|| {
            ConfigError::Schema(format!("unknown preset `{name}` (expected cos, twap, or vwap)"))
        })?;
        let h = grid_h.unwrap_or(presets::DEFAULT_STEP);
        let grid = Grid::with_step(preset.params.horizon, h).map_err(domain)?;
        let exp = Self {
            preset: Some(preset.name.to_string()),
            params: preset.params,
            inv: preset.inventories,
            artifacts: default_artifacts(&preset.target),
            target: preset.target,
            grid,
            options: SolveOptions::default(),
            nplayer_sizes: DEFAULT_NPLAYER_SIZES.to_vec(),
            output_dir: out.unwrap_or_else(|| PathBuf::from(".")),
        };
        exp.check_step_target_grid()?;
        Ok(exp)
    }

    /// Loads a TOML configuration file, applying the command-line overrides
    /// (`--grid-h` beats the `[grid]` section, `--out` beats `output_dir`).
    pub fn from_file(
        path: &Path,
        grid_h: Option<f64>,
        out: Option<PathBuf>,
    ) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Parse(format!("cannot read {}: {e}", path.display())))?;
        // Stage 1 — syntax. A successful parse to a generic value proves the
        // document is well-formed TOML, so any later failure is about shape
        // or content, never syntax.
        toml::from_str::<toml::Value>(&text)
            .map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
        // Stage 2 — shape. Required sections must be present and well-typed;
        // unknown keys are rejected.
        let raw: RawConfig = toml::from_str(&text)
            .map_err(|e| ConfigError::Schema(format!("{}: {e}", path.display())))?;
        // Stage 3 — content. The model constructors enforce the domain
        // invariants.
        raw.resolve(grid_h, out)
    }

    /// Step-shaped targets jump at period boundaries; those instants must be
    /// grid nodes or the schedule cannot be represented on the mesh. Checked
    /// at configuration time so the failure is a configuration diagnostic
    /// rather than a solver error deep inside a pipeline.
    fn check_step_target_grid(&self) -> Result<(), ConfigError> {
        if !matches!(
            self.target,
            TargetStrategy::TwapStep { .. } | TargetStrategy::TwapResidual { .. }
        ) {
            return Ok(());
        }
        let n = self.target.n_periods().expect("step targets carry a period count");
        let period = self.target.horizon() / f64::from(n);
        let cells = period / self.grid.step();
        if (cells - cells.round()).abs() > 1e-9 * cells.max(1.0) {
            return Err(ConfigError::Domain(format!(
                "grid step {:e} does not divide the target period {period} \
                 ({cells:.6} cells per period): jump times must land on grid nodes",
                self.grid.step()
            )));
        }
        Ok(())
    }
}

/// Artifact set used when the configuration does not request one explicitly:
/// everything the target supports.
fn default_artifacts(target: &TargetStrategy) -> Vec<Artifact> {
    if target.periodic_residual().is_ok() {
        vec![Artifact::Trajectories, Artifact::Decomposition, Artifact::Costs, Artifact::Amplitudes]
    } else {
        vec![Artifact::Trajectories, Artifact::Costs, Artifact::Spectrum]
    }
}

/// Top-level document. Every accepted key is listed here; anything else is
/// rejected at the schema stage.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    output_dir: Option<PathBuf>,
    market: RawMarket,
    inventories: RawInventories,
    target: RawTarget,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    options: RawOptions,
    #[serde(default)]
    outputs: RawOutputs,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMarket {
    a0: f64,
    a: f64,
    lambda0: f64,
    lambda: f64,
    phi0: f64,
    phi: f64,
    sigma: f64,
    horizon: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInventories {
    major: f64,
    minor: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTarget {
    kind: String,
    q0: Option<f64>,
    n_periods: Option<u32>,
    amplitude: Option<f64>,
    rates: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    h: Option<f64>,
    n_mesh: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    max_iter: Option<usize>,
    tol: Option<f64>,
    oracle_quadrature_steps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutputs {
    artifacts: Option<Vec<String>>,
    nplayer: Option<Vec<usize>>,
}

impl RawConfig {
    fn resolve(self, grid_h: Option<f64>, out: Option<PathBuf>) -> Result<Experiment, ConfigError> {
        let m = &self.market;
        let params =
            MarketParams::new(m.a0, m.a, m.lambda0, m.lambda, m.phi0, m.phi, m.sigma, m.horizon)
                .map_err(domain)?;
        let inv =
            Inventories::new(self.inventories.major, self.inventories.minor).map_err(domain)?;
        let target = self.target.build(&params, &inv)?;
        let grid = self.grid.build(params.horizon, grid_h)?;
        let artifacts = match &self.outputs.artifacts {
            Some(list) => list.iter().map(|s| Artifact::parse(s)).collect::<Result<Vec<_>, _>>()?,
            None => default_artifacts(&target),
        };
        let nplayer_sizes = self.outputs.nplayer.unwrap_or_else(|| DEFAULT_NPLAYER_SIZES.to_vec());
        if nplayer_sizes.is_empty() {
            return Err(ConfigError::Schema("outputs.nplayer must not be empty".into()));
        }
        let exp = Experiment {
            preset: None,
            params,
            inv,
            target,
            grid,
            options: self.options.build(),
            artifacts,
            nplayer_sizes,
            output_dir: out.or(self.output_dir).unwrap_or_else(|| PathBuf::from(".")),
        };
        exp.check_step_target_grid()?;
        Ok(exp)
    }
}

impl RawTarget {
    fn build(
        &self,
        params: &MarketParams,
        inv: &Inventories,
    ) -> Result<TargetStrategy, ConfigError> {
        let kind = self.kind.as_str();
        let q0 = self.q0.unwrap_or(inv.major);
        let horizon = params.horizon;
        // Reject fields the chosen kind does not read; ignoring them would
        // mask typos in the experiment description.
        let reject_unused = |field: &str, used: bool, set: bool| -> Result<(), ConfigError> {
            if set && !used {
                return Err(ConfigError::Schema(format!(
                    "target field `{field}` is not valid for kind `{kind}`"
                )));
            }
            Ok(())
        };
        let uses_periods = matches!(kind, "cosine" | "twap_step" | "twap_residual");
        reject_unused("n_periods", uses_periods, self.n_periods.is_some())?;
        reject_unused("amplitude", kind == "cosine", self.amplitude.is_some())?;
        reject_unused("rates", kind == "sampled_rate", self.rates.is_some())?;
        let n_periods = || {
            self.n_periods.ok_or_else(|| {
                ConfigError::Schema(format!("target kind `{kind}` requires `n_periods`"))
            })
        };
        match kind {
            "dtwap" => TargetStrategy::d_twap(q0, horizon).map_err(domain),
            "cosine" => {
                let amplitude = self.amplitude.ok_or_else(|| {
                    ConfigError::Schema("target kind `cosine` requires `amplitude`".into())
                })?;
                TargetStrategy::cosine(q0, horizon, n_periods()?, amplitude).map_err(domain)
            }
            "twap_step" => TargetStrategy::twap_step(q0, horizon, n_periods()?).map_err(domain),
            "twap_residual" => {
                TargetStrategy::twap_residual(q0, horizon, n_periods()?).map_err(domain)
            }
            "sampled_rate" => {
                let rates = self.rates.clone().ok_or_else(|| {
                    ConfigError::Schema("target kind `sampled_rate` requires `rates`".into())
                })?;
                TargetStrategy::sampled_rate(q0, horizon, rates).map_err(domain)
            }
            other => Err(ConfigError::Schema(format!(
                "unknown target kind `{other}` (expected dtwap, cosine, twap_step, \
                 twap_residual, or sampled_rate)"
            ))),
        }
    }
}

impl RawGrid {
    fn build(&self, horizon: f64, grid_h: Option<f64>) -> Result<Grid, ConfigError> {
        if let Some(h) = grid_h {
            return Grid::with_step(horizon, h).map_err(domain);
        }
        match (self.h, self.n_mesh) {
            (Some(_), Some(_)) => {
                Err(ConfigError::Schema("grid accepts either `h` or `n_mesh`, not both".into()))
            }
            (Some(h), None) => Grid::with_step(horizon, h).map_err(domain),
            (None, Some(n)) => Grid::from_parts(horizon, n).map_err(domain),
            (None, None) => Grid::with_step(horizon, presets::DEFAULT_STEP).map_err(domain),
        }
    }
}

impl RawOptions {
    fn build(&self) -> SolveOptions {
        let d = SolveOptions::default();
        SolveOptions {
            max_iter: self.max_iter.unwrap_or(d.max_iter),
            tol: self.tol.unwrap_or(d.tol),
            oracle_quadrature_steps: self
                .oracle_quadrature_steps
                .unwrap_or(d.oracle_quadrature_steps),
        }
    }
}
