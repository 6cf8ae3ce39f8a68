//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong while building model objects or solving.
#[derive(Debug, Error)]
pub enum Error {
    /// A model, grid, or target parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A time argument lies outside the trading horizon `[0, T]`.
    #[error("time {t} outside the trading horizon [0, {t_end}]")]
    OutOfDomain { t: f64, t_end: f64 },

    /// Two grids disagree, or a value vector does not match its grid.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The target strategy has no trading rate at jump times.
    #[error("target strategy is not differentiable: {0}")]
    NotDifferentiable(String),

    /// The target strategy admits no periodic/trend decomposition.
    #[error("target strategy is not periodically decomposable: {0}")]
    NotPeriodic(String),

    /// A pivot in the block-tridiagonal elimination vanished.
    #[error("singular linear system: {0}")]
    SingularSystem(String),

    /// A dense matrix factorization failed.
    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    /// An iterative solve did not reach its tolerance.
    #[error("no convergence after {iterations} iterations (last update {last_delta:.3e})")]
    NonConvergence { iterations: usize, last_delta: f64 },

    /// An amplitude/phase pair was requested for an identically-zero signal.
    #[error("degenerate phase: {0}")]
    DegeneratePhase(String),

    /// The discrete best-response (KKT) system could not be factorized.
    #[error("singular KKT system: {0}")]
    SingularKkt(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
