use thiserror::Error;

/// Errors raised by the transform, inversion, pooling and ingestion routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// `sin(2θ) = 0`, so the closed-form inverse divides by zero.
    #[error("singularity: sin(2θ) vanishes at θ = {theta}")]
    Singularity { theta: f64 },

    /// The radicand of the closed-form inverse is negative beyond tolerance.
    #[error("inverse undefined at θ = {theta}, n = {n}: radicand {radicand} < 0")]
    UndefinedInverse { theta: f64, n: f64, radicand: f64 },

    /// Malformed input row. `row` is the 1-based line number in the source.
    #[error("parse error on line {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
