use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("{routine} did not converge after {iterations} sweeps")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
    },

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("invalid measurement: completeness residual {residual:e} exceeds tolerance {tolerance:e}")]
    Incomplete { residual: f64, tolerance: f64 },

    #[error("index {index} out of range (len {len})")]
    OutOfRange { index: usize, len: usize },

    #[error("outcome has zero probability (p = {0:e})")]
    ImpossibleOutcome(f64),

    #[error("outcome {0} has no success branch")]
    NoSuccessBranch(usize),

    #[error("radicand {value:e} in {context} is negative beyond tolerance")]
    NegativeRadicand { context: &'static str, value: f64 },

    #[error("invalid error model: {0}")]
    Model(String),

    #[error("missing input: {0}")]
    MissingInput(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown measurement family `{0}`")]
    UnknownFamily(String),
}

pub type Result<T> = std::result::Result<T, Error>;
