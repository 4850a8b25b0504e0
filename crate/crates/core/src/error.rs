use thiserror::Error;

/// Errors produced by state construction, the measurement protocols, and
/// the configuration / emission layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("ensemble of size {got} is too small: need at least {need} members")]
    InsufficientEnsemble { need: usize, got: usize },

    #[error("insufficient data: channel `{channel}` cannot be estimated")]
    InsufficientData { channel: &'static str },

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("config field `{field}` invalid: {reason}")]
    ConfigInvalid { field: &'static str, reason: String },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
