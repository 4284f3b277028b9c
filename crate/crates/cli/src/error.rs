use std::path::PathBuf;

use qwalk::WalkError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Args(String),

    #[error(transparent)]
    Parse(#[from] crate::expr::ParseError),

    #[error(transparent)]
    Walk(#[from] WalkError),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },

    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn args(msg: impl Into<String>) -> Self {
        Self::Args(msg.into())
    }

    /// 1 for I/O, 2 for bad arguments, 3 when a compute cap is hit.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Walk(e) if e.is_resource_limit() => 3,
            Self::Args(_) | Self::Parse(_) | Self::Walk(_) => 2,
            Self::Io { .. } | Self::Input { .. } | Self::Output(_) => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
