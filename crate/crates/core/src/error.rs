use thiserror::Error;

/// Errors produced by the region evaluators, solvers and simulators.
#[derive(Debug, Error)]
pub enum Error {
    /// Bad arguments: unknown variable names, overlapping sets, out-of-range
    /// parameters, malformed configuration.
    #[error("usage error: {0}")]
    Usage(String),

    /// A probability table violated its invariants.
    #[error("invalid distribution: {0}")]
    InvalidPmf(String),

    /// Dense storage or exhaustive enumeration would exceed the fixed limit.
    #[error("capacity exceeded: {what} needs {needed} cells, limit is {limit}")]
    Capacity {
        what: String,
        needed: u128,
        limit: u128,
    },

    /// The requested distortion lies below the minimum achievable one.
    #[error("infeasible distortion {requested}: minimum achievable is {minimum}")]
    Infeasible { requested: f64, minimum: f64 },

    /// A structural assumption (Markov chain, factorization, ...) does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
