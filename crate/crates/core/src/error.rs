use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not on the Grassmann manifold: {0}")]
    NotOnManifold(String),
    #[error("tangent coordinate anchored elsewhere: {0}")]
    AnchorMismatch(String),
    #[error("weight construction failed: {0}")]
    ConstructionFailed(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("consistency check failed: {0}")]
    Consistency(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
