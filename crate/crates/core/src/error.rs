use thiserror::Error;

/// Errors produced by the orientation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrientError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("invalid location: z = {z} (object must be in front of the camera)")]
    InvalidLocation { z: f64 },

    #[error("degenerate circular mean: resultant length {resultant:e} is too small")]
    DegenerateMean { resultant: f64 },

    #[error("degenerate vector: {0}")]
    DegenerateVector(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = OrientError> = std::result::Result<T, E>;

impl OrientError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        OrientError::InvalidInput(msg.into())
    }
}
