//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("design matrix is rank deficient (collinear columns)")]
    RankDeficient,

    #[error("logistic fit has no finite optimum (separated data): coefficient norm {norm}, separation bound {bound}")]
    Separation { norm: f64, bound: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("treatment group {0} is empty")]
    EmptyGroup(u8),

    #[error("treatment group {group} has {size} observations, need more than {dim} for covariance estimation")]
    InsufficientGroupSize { group: u8, size: usize, dim: usize },

    #[error("subclass {stratum} contains no observations from arm {arm}")]
    EmptySubclassArm { stratum: usize, arm: u8 },

    #[error("degenerate propensity score {value} at row {row}: values must lie strictly in (0,1)")]
    DegeneratePs { row: usize, value: f64 },

    #[error("model has the wrong shape: {0}")]
    WrongShape(String),

    #[error("{p} covariates exceed the enumeration limit of {max}")]
    TooManyCovariates { p: usize, max: usize },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("invalid experiment configuration: {0}")]
    Config(String),

    #[error("parse error at row {row}, column `{column}`: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("column `{0}` not found in input")]
    MissingColumn(String),

    #[error("column `{0}` has no observed values to impute from")]
    AllMissingColumn(String),

    #[error("treatment column has non-binary value `{value}` at row {row}")]
    NonBinaryTreatment { row: usize, value: String },

    #[error("data contains missing cells; impute before estimation")]
    MissingData,

    #[error("estimate is not finite ({0})")]
    NonFinite(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used by callers that map failures to exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Bad invocation: unknown scenario, inconsistent configuration.
    Usage,
    /// The input data could not be read or fails its schema.
    Data,
    /// The computation itself failed (singular designs, degenerate weights, ...).
    Numerical,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            UnknownScenario(_) | Config(_) => ErrorCategory::Usage,
            Parse { .. } | MissingColumn(_) | AllMissingColumn(_) | NonBinaryTreatment { .. }
            | MissingData | Io(_) | Json(_) => ErrorCategory::Data,
            _ => ErrorCategory::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
