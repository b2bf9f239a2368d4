use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A privacy or algorithm parameter is outside its valid range.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// Input data is empty, inconsistent or non-finite.
    #[error("invalid data: {0}")]
    Data(String),
    /// A required callback or option was not supplied.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("infeasible problem: {0}")]
    Infeasible(String),
    /// A numerical routine failed; `residual` reports how far off it was.
    #[error("numerical failure: {message} (residual {residual:e})")]
    Numeric { message: String, residual: f64 },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>, residual: f64) -> Self {
        Error::Numeric { message: msg.into(), residual }
    }
}

/// Fails with a parameter error unless `value` is finite and strictly positive.
pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be finite and > 0, got {value}")))
    }
}

/// Fails unless `value` lies in the open unit interval.
pub(crate) fn ensure_unit_open(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must lie in (0, 1), got {value}")))
    }
}
