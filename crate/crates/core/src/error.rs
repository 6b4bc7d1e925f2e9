use thiserror::Error;

pub type Result<T, E = PulseError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum PulseError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("negative time {0} s")]
    NegativeTime(f64),

    #[error("target unreachable: {0}")]
    Unreachable(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("pulse covers {available} s but {required} s were requested")]
    PulseTooShort { available: f64, required: f64 },

    #[error("pulse variant `{0}` has no closed-form response")]
    UnsupportedVariant(&'static str),

    #[error("coincident endpoints: efficiency is undefined")]
    CoincidentEndpoints,

    #[error("Fock truncation overflow: top-level population {population:e} exceeds 1e-6")]
    TruncationOverflow { population: f64 },

    #[error("degenerate problem: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl PulseError {
    /// Whether the error stems from rejected input rather than from I/O or numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            PulseError::InvalidParameter(_)
                | PulseError::NegativeTime(_)
                | PulseError::NonFinite(_)
                | PulseError::PulseTooShort { .. }
                | PulseError::UnsupportedVariant(_)
                | PulseError::CoincidentEndpoints
                | PulseError::Json(_)
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> PulseError {
    PulseError::InvalidParameter(msg.into())
}
