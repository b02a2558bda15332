//! Error type shared across the workbench.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested parameter vector does not define a stationary model.
    #[error("stationarity violated: {0}")]
    Stationarity(String),

    /// The regression design carries no usable information.
    #[error("degenerate design: {0}")]
    DegenerateDesign(String),

    /// A data source cannot supply the extended sample.
    #[error("insufficient data: need {needed} observations, have {available}")]
    InsufficientData { needed: usize, available: usize },

    /// The plug-in variance estimate is zero, so the test statistic is undefined.
    #[error("degenerate variance: plug-in tau^2 is zero")]
    DegenerateVariance,

    /// The central-sequence gradient vanishes where the correction divides by it.
    #[error("zero gradient: {0}")]
    ZeroGradient(String),

    /// A numeric routine failed to converge or produced a non-finite value.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Structured text (config or CSV) failed to parse.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An experiment-level failure, e.g. too many replicate errors.
    #[error("experiment error: {0}")]
    Experiment(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
