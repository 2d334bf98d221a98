use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition does not hold (e.g. bounds of an empty set).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An iterative numeric routine failed to reach its tolerance.
    #[error("numeric failure: {message}")]
    Numeric { message: String },

    /// The rejection sampler ran out of attempts.
    #[error(
        "acceptance too rare: {accepted} accepted in {attempts} attempts \
         (empirical rate {rate:.3e}, budget {max_attempts})"
    )]
    SamplingBudget {
        attempts: u64,
        accepted: u64,
        rate: f64,
        max_attempts: u64,
    },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric {
            message: msg.into(),
        }
    }
}
