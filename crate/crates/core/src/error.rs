use thiserror::Error;

/// Errors raised by the matrix engine, the operator means and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),

    #[error("function not finite on spectrum: {0}")]
    DomainError(String),

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("weight {value} outside admissible range {range}")]
    InvalidWeight { value: f64, range: &'static str },

    #[error("hypothesis not satisfied: {0}")]
    HypothesisError(String),

    #[error("case {0} has no stated reverse inequality")]
    NoDual(String),

    #[error("unknown case: {0}")]
    UnknownCase(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
