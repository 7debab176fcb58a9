use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Quadrature or series summation did not reach tolerance. Carries the
    /// best estimate obtained before giving up.
    #[error("numeric error: {message} (partial estimate {partial:e})")]
    Numeric { message: String, partial: f64 },

    #[error("truncation insufficient: residual bound {residual:e} exceeds tolerance {tolerance:e}; try k_in >= {suggested_k_in}")]
    TruncationInsufficient {
        residual: f64,
        tolerance: f64,
        suggested_k_in: usize,
    },

    #[error("insufficient truncation: {0}")]
    InsufficientTruncation(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no theorem covers the parameters: {0}")]
    NoPrediction(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn numeric(message: impl Into<String>, partial: f64) -> Self {
        Error::Numeric {
            message: message.into(),
            partial,
        }
    }
}
