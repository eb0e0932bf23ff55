use thiserror::Error;

/// Errors shared by every module of the workbench.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("division by an identically zero expression")]
    DivisionByZeroExpr,

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("denominator vanishes at {0}")]
    PoleAtPoint(String),

    #[error("chart mismatch: {0}")]
    ChartMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("real rank is not constant on the sample set; offending points: {0}")]
    NonConstantRank(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid chart: {0}")]
    InvalidChart(String),
}

pub type Result<T> = std::result::Result<T, Error>;
