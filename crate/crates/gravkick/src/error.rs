use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{path}`{}: {message}", location.map(|(l, c)| format!(" (line {l}, column {c})")).unwrap_or_default())]
    Config { path: String, location: Option<(usize, usize)>, message: String },
    #[error(transparent)]
    Core(#[from] gravkick_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("malformed file {}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config { .. } => "config",
            CliError::Core(e) => e.kind(),
            CliError::Io { .. } => "io",
            CliError::Format { .. } => "format",
            CliError::Usage(_) => "usage",
        }
    }

    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config { path: path.into(), location: None, message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// One-line machine-readable form for stderr.
    pub fn to_json(&self) -> String {
        let mut obj = serde_json::json!({
            "error": self.kind(),
            "message": self.to_string(),
        });
        if let CliError::Config { path, location, .. } = self {
            obj["field"] = serde_json::Value::from(path.as_str());
            if let Some((l, c)) = location {
                obj["line"] = serde_json::Value::from(*l);
                obj["column"] = serde_json::Value::from(*c);
            }
        }
        obj.to_string()
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
