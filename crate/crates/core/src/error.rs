use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {0:?} is not in the space")]
    UnknownPoint(String),

    #[error("injectivity violated: {0}")]
    NotInjective(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("algebraic identity failed: {0}")]
    IdentityFailed(String),

    #[error("construction not implemented for this family: {0}")]
    NotImplemented(String),

    #[error("certificate failed re-verification: {0}")]
    BadCertificate(String),
}
