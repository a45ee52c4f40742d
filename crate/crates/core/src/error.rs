use thiserror::Error;

/// Errors produced by model construction, solving and file handling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("problem size {required} exceeds limit {limit}")]
    Size { required: usize, limit: usize },

    #[error("degenerate instance: {0}")]
    Degenerate(String),

    #[error("infeasible instance: {0}")]
    Infeasible(String),

    #[error("validation failed for `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported schema version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("model layout error: {0}")]
    Model(String),

    #[error("non-finite objective value {value} at evaluation {evaluation}")]
    NonFinite { value: f64, evaluation: usize },

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
