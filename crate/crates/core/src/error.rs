use thiserror::Error;

/// Errors produced by network construction, estimation and design solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: self-loop on node `{node}`")]
    SelfLoop { line: usize, node: String },

    #[error("input contains no edges")]
    EmptyInput,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "could not draw a network without isolated nodes in {attempts} attempts (n={n}, p={p}); use a larger density"
    )]
    RetryExhausted { n: usize, p: f64, attempts: usize },

    #[error("cluster list is empty")]
    EmptyClusters,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("singular design: {0}")]
    SingularDesign(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("problem size n={n} exceeds the enumeration cap of {cap}; use branch-and-bound or local search")]
    TooLarge { n: usize, cap: usize },

    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),

    #[error("matrix factorization failed: {0}")]
    Factorization(String),

    #[error("{0}")]
    Estimation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
