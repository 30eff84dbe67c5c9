use thiserror::Error;

use crate::quadrature::QuadError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A configuration or argument outside the accepted domain.
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },

    #[error("numerical integration failed: {0}")]
    Quadrature(#[from] QuadError),

    /// An evaluation inside a sweep failed; carries the offending point.
    #[error("sweep point {axis}={axis_value} ({scheme}, {method}): {source}")]
    SweepPoint {
        axis: String,
        axis_value: String,
        scheme: String,
        method: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field,
            reason: reason.into(),
        }
    }

    /// True for input-validation failures, false for numerical ones.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Invalid { .. } => true,
            Error::Quadrature(_) => false,
            Error::SweepPoint { source, .. } => source.is_validation(),
        }
    }
}
