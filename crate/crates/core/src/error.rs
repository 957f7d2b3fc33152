//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter failed validation. Carries the offending key name
    /// so callers can point at the bad config line.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    /// A required config key was absent.
    #[error("missing config key `{0}`")]
    MissingKey(String),

    /// A config value could not be parsed.
    #[error("config key `{key}`: cannot parse `{value}` as {expected}")]
    BadValue {
        key: String,
        value: String,
        expected: &'static str,
    },

    /// The steady-state coherence system has no unique solution
    /// (both control fields off, or an exactly vanishing denominator).
    #[error("singular coherence system: {0}")]
    SingularSystem(String),

    /// A solver produced NaN or infinite matrix entries.
    #[error("non-finite result in {0}")]
    NonFinite(&'static str),

    /// Time grid does not contain the pulse: the envelope is not negligible
    /// at the grid edges, so spectral propagation would wrap around.
    #[error("pulse envelope not negligible at grid edges (edge/peak = {edge_ratio:.3e}); extend the time grid")]
    GridTruncation { edge_ratio: f64 },

    /// Denominator of a ratio-style observable vanished.
    #[error("undefined ratio: {0}")]
    UndefinedRatio(&'static str),

    /// Success probability must be positive for fidelity formulas.
    #[error("non-positive success probability T = {0}")]
    NonPositiveT(f64),

    /// Inverting a correlation measurement produced |cos(phi)| > 1 by more
    /// than the propagated uncertainty.
    #[error(
        "inconsistent data: |cos(phi)| = {value:.4} exceeds 1 beyond its uncertainty {sigma:.4}"
    )]
    InconsistentCosPhi { value: f64, sigma: f64 },

    /// Least-squares fit did not converge within the iteration budget.
    #[error("fit did not converge after {iterations} iterations (last rms residual {last_residual:.3e})")]
    FitDiverged {
        iterations: usize,
        last_residual: f64,
    },

    /// Data too flat or too short to support a Gaussian-plus-baseline fit.
    #[error("degenerate fit data: {0}")]
    DegenerateData(String),

    /// The delay grid does not bracket the interference dip.
    #[error("delay grid does not cover the dip: {0}")]
    DipNotCovered(String),

    /// A step-halving convergence check failed.
    #[error("convergence check failed: {quantity} changed by {change:.3e} (limit {limit:.3e}) when refining")]
    NotConverged {
        quantity: &'static str,
        change: f64,
        limit: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
