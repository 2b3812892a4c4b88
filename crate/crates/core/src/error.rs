use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group table: {0}")]
    InvalidTable(String),

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error(
        "not a normalized 2-cocycle: identity fails at {triples:?}, normalization fails at {normalization:?}"
    )]
    CocycleViolation {
        triples: Vec<(usize, usize, usize)>,
        normalization: Vec<(usize, usize)>,
    },

    #[error("group is not a declared product of cyclic groups")]
    NotCyclicProduct,

    #[error("bilinear form is not well defined modulo the cyclic orders: {0}")]
    NotWellDefined(String),

    #[error("operands live on different groups")]
    GroupMismatch,

    #[error("twisted operator carries no generator coefficients")]
    MissingCoefficients,

    #[error("function is not sigma-positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("degenerate state: phi(e) = {0:e}")]
    DegenerateState(f64),

    #[error("zero vector")]
    ZeroVector,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("solver failed: {0}")]
    SolverFailure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
