use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("missing required parameter --{0}")]
    Missing(String),
    #[error("invalid value {value:?} for --{key}: {reason}")]
    Invalid {
        key: String,
        value: String,
        reason: String,
    },
    #[error("parameter --{key} is not accepted by `{command}`")]
    Unexpected { key: String, command: &'static str },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] embezzle_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;
