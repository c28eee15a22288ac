use thiserror::Error;

use crate::space::SpaceKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {what}: {reason}")]
    Validation { what: &'static str, reason: String },

    #[error("coordinate index {index} does not exist in {space}")]
    Index { index: usize, space: SpaceKind },

    #[error("space mismatch: expected {expected}, found {found}")]
    SpaceMismatch { expected: SpaceKind, found: SpaceKind },

    #[error("coordinate {index} cannot be determined to within {tolerance:e}")]
    Undetermined { index: usize, tolerance: f64 },
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            what,
            reason: reason.into(),
        }
    }
}
