use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data failed validation. `row` is 1-based when known.
    #[error("{}", match .row { Some(r) => format!("invalid data at row {r}: {msg}"), None => format!("invalid data: {msg}") })]
    Validation { row: Option<usize>, msg: String },

    /// Malformed text input.
    #[error("parse error at row {row}: {msg}")]
    Parse { row: usize, msg: String },

    /// A required input (bin means, enough boundaries) is missing.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("GLD parameters not identifiable: {0}")]
    Identifiability(String),

    #[error("GLD fit did not converge from any starting point (best residual {best_residual:e})")]
    FitFailed { best_residual: f64 },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("bootstrap replicate {replicate} failed: {source}")]
    Replicate {
        replicate: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn validation(row: impl Into<Option<usize>>, msg: impl Into<String>) -> Self {
        Error::Validation {
            row: row.into(),
            msg: msg.into(),
        }
    }
}
