use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("generator is not traceless (|tr| = {0:.3e})")]
    NotTraceless(f64),

    #[error("matrix is not in SU(d): {0}")]
    NotSpecialUnitary(String),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("non-finite matrix entries")]
    NonFinite,

    #[error("invalid spin quantum number J = {0}")]
    InvalidSpin(f64),

    #[error("element lies in the span of the existing basis")]
    InSpan,

    #[error("commutator is not proportional to the requested element (residual {0:.3e})")]
    NotProportional(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient drive order: have {have}, need {need}")]
    InsufficientOrder { have: usize, need: usize },

    #[error("unknown target label `{0}`")]
    UnknownTarget(String),

    #[error("numeric invariant violated: {0}")]
    InvariantViolation(String),

    #[error("eigendecomposition failed to converge")]
    NoConvergence,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
