use thiserror::Error;

/// Errors shared across the construction and verification modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-integral exponent: {0}")]
    NonIntegralExponent(String),
    #[error("parameters out of order: need 0 < tau < t <= 1, got tau = {tau}, t = {t}")]
    BadOrder { tau: String, t: String },
    #[error("integrality failure: {0}")]
    IntegralityFailure(String),
    #[error("size limit exceeded: {needed} points requested, limit {limit}")]
    SizeLimit { needed: String, limit: u64 },
    #[error("bad digit set: {0}")]
    BadDigits(String),
    #[error("scale {scale} is finer than the set resolution {resolution}")]
    ScaleTooFine { scale: String, resolution: String },
    #[error("operation requires a nonempty set")]
    EmptySet,
    #[error("restriction to [0,1) has zero mass")]
    ZeroMass,
    #[error("level {level} out of range 1..={max}")]
    BadLevel { level: u32, max: u32 },
    #[error("set is not uniform: {0}")]
    NotUniform(String),
    #[error("operands use different radix bases")]
    MismatchedBase,
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed set dump: {0}")]
    BadDump(String),
}

pub type Result<T> = std::result::Result<T, Error>;
