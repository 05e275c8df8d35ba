use thiserror::Error;

/// Errors raised by matrix validation, witness construction and I/O.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace}, expected 1")]
    NotUnitTrace { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("generator index {index} outside 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("h = {h} lies outside the witness interval [{lo}, {hi}]")]
    OutOfInterval { h: f64, lo: f64, hi: f64 },

    #[error("invalid interval: m = {lo} exceeds M = {hi}")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("state has no off-diagonal entry above tolerance")]
    NotCoherent,

    #[error("a, b and c are all zero")]
    ZeroOperator,

    #[error("degenerate pair family: {0}")]
    DegenerateFamily(String),

    #[error("coefficient s_{index} is zero")]
    ZeroCoefficient { index: usize },

    #[error("witness family is empty")]
    EmptyFamily,

    #[error("{0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;
