use thiserror::Error;

/// Errors raised by the library.
///
/// Verification failures (a formula disagreeing with its oracle) are not
/// errors; they are reported through `pass` flags on the reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: u64, modulus: u64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precision failure: {0}")]
    Precision(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("structure violation: {0}")]
    StructureViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
