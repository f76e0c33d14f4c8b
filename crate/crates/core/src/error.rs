//! Error type shared across the solver layers.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A coefficient function violated positivity (or monotonicity) on the
    /// validation grid.
    #[error("validation failed: {func}({x}) = {value} violates {requirement}")]
    Validation {
        func: &'static str,
        x: f64,
        value: f64,
        requirement: &'static str,
    },

    /// Structurally invalid problem data (non-positive length, bad tolerances, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The adaptive integrator ran out of steps before reaching the right endpoint.
    #[error("integration exhausted {max_steps} steps at x = {reached}")]
    Integration { reached: f64, max_steps: usize },

    /// A coefficient or state evaluation produced a non-finite value.
    #[error("non-finite evaluation at x = {x}")]
    Evaluation { x: f64 },

    /// Evaluation at (or numerically indistinguishable from) a pole.
    #[error("pole: {0}")]
    Pole(String),

    /// A bracketing search ran out of its expansion budget.
    #[error("search failed: {0}")]
    Search(String),

    /// The requested operation is undefined for this parameter regime.
    #[error("regime error: {0}")]
    Regime(String),

    /// A series did not converge within the term budget.
    #[error("series did not converge: {0}")]
    Series(String),

    /// Wildly varying finite-difference ratios; the result is unreliable.
    #[error("conditioning warning: {0}")]
    Conditioning(String),

    /// A sampled transform input vanished where it must stay positive.
    #[error("transform error: {0}")]
    Transform(String),
}
