use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    /// Unparseable or inconsistent configuration.
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Model(#[from] qfi_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    pub fn config(msg: impl Into<String>) -> Self {
        RunError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        RunError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Model(_) => 3,
            RunError::Io { .. } => 4,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RunError::Config(_) => "ConfigError",
            RunError::Model(e) => e.name(),
            RunError::Io { .. } => "IoError",
        }
    }

    /// One-line JSON written to stderr on failure.
    pub fn record(&self) -> serde_json::Value {
        json!({
            "error": self.name(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
    }
}
