use thiserror::Error;

/// Errors raised by constructors and estimators in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("malformed path: field `{field}`: {reason}")]
    MalformedPath { field: &'static str, reason: String },

    #[error("splitting extinct at stage {stage} of replicate {replicate} (level {level})")]
    Extinction {
        replicate: usize,
        stage: usize,
        level: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
