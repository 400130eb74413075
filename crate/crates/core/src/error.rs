use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid study {id}: {reason}")]
    InvalidStudy { id: String, reason: String },

    #[error("degenerate study {id}: zero cell after continuity correction")]
    DegenerateStudy { id: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("covariance matrix of study {study} is singular")]
    SingularCovariance { study: usize },

    #[error("no sign change for the selection intercept in [{lo}, {hi}]")]
    BracketingFailed { lo: f64, hi: f64 },

    #[error("optimization failed: {0}")]
    OptimizationFailed(String),

    #[error("observed information is not positive definite")]
    NonInvertibleHessian,

    #[error("no study was selected")]
    EmptySelection,

    #[error("not enough studies: {0}")]
    TooFewStudies(usize),

    #[error("missing column: {0}")]
    MissingColumn(String),

    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
