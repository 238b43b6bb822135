use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point or set does not live in the space it is used with.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Malformed input value (non-finite coordinate, index out of range, ...).
    #[error("input error: {0}")]
    Input(String),

    /// A construction parameter lies outside its admissible range.
    #[error("configuration error: {0}")]
    Config(String),

    /// The schedule leaves its admissible ranges at index `n`.
    #[error("schedule range violation at n = {n}: {message}")]
    ScheduleRange { n: u64, message: String },

    /// Picard iteration on the implicit step did not reach the inner tolerance.
    #[error("inner solve did not converge after {iterations} iterations (last step {last_step:.3e}); is T nonexpansive?")]
    InnerDivergence { iterations: usize, last_step: f64 },

    /// A diagnostic was requested on inputs that do not support it.
    #[error("diagnostic error: {0}")]
    Diagnostic(String),
}

pub type Result<T> = std::result::Result<T, Error>;
