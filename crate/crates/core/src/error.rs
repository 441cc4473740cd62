use thiserror::Error;

/// Failure modes of the series engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QError {
    /// No nonzero coefficient is visible below the precision horizon, so the
    /// series cannot be told apart from zero.
    #[error("insufficient precision: no nonzero term below the horizon")]
    InsufficientPrecision,
    #[error("non-integral power of a monomial with negative coefficient")]
    HalfPowerOfNegative,
    #[error("power of monomial coefficient is not rational: {0}")]
    UnrepresentablePower(String),
    #[error("pole at specialization: {0}")]
    PoleAtSpecialization(String),
    #[error("window violation: {0}")]
    WindowViolation(String),
    #[error("enumeration did not terminate: {0}")]
    NonterminatingEnumeration(String),
    #[error("non-generic specialization: {0}")]
    NonGenericSpecialization(String),
    #[error("pochhammer factor is not a unit: {0}")]
    NonUnitFactor(String),
    #[error("unknown builtin: {0}")]
    UnknownBuiltin(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("malformed series text: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, QError>;
