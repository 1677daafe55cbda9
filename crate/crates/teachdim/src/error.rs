use thiserror::Error;

/// A CLI-level failure with a stable machine-readable code; rendered as
/// `{"error": {"code", "message"}}` on stderr with exit status 2.
#[derive(Debug, Clone, Error)]
#[error("{message}")]
pub struct CliError {
    pub code: String,
    pub message: String,
}

impl CliError {
    pub fn new(code: impl Into<String>, message: impl Into<String>) -> Self {
        CliError { code: code.into(), message: message.into() }
    }
}

impl From<teachdim_core::Error> for CliError {
    fn from(e: teachdim_core::Error) -> Self {
        CliError { code: e.code().to_string(), message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new("io_error", e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::new("parse_error", e.to_string())
    }
}
