use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input `{field}`: {reason}")]
    InvalidInput { field: &'static str, reason: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("map is not equivariant under the requested translations (defect {defect:e} > {tolerance:e})")]
    NotEquivariant { defect: f64, tolerance: f64 },

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
