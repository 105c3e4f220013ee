use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),

    #[error("point is not in the tube domain (rho = {rho:e})")]
    OutsideDomain { rho: f64 },

    #[error("point is not in the open unit ball (|xi| = {norm})")]
    OutsideBall { norm: f64 },

    #[error("complex power requires Re(base) > 0, got {re:e}")]
    BranchGuard { re: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("malformed document: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Document(e.to_string())
    }
}
