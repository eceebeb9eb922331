use thiserror::Error;

/// Errors produced by the library.
///
/// `Degenerate` covers quantities that are mathematically undefined or
/// infinite (0/0 ratios, disconnected graphs) and is kept distinct from
/// `Numeric`, which signals a solver that failed to converge.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("resource cap exceeded: {what} needs {needed}, cap is {cap}")]
    Resource { what: String, needed: f64, cap: f64 },
    #[error("numeric failure: {msg} (residual {residual:e})")]
    Numeric { msg: String, residual: f64 },
    #[error("degenerate instance: {0}")]
    Degenerate(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}

pub(crate) fn resource<T>(what: impl Into<String>, needed: f64, cap: f64) -> Result<T> {
    Err(Error::Resource { what: what.into(), needed, cap })
}
