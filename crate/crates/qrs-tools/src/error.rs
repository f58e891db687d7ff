//! The error type shared by the drivers and the command-line tool.

use std::fmt;
use std::path::{Path, PathBuf};

/// Failure of a tool invocation, classified by exit code.
#[derive(Debug)]
pub enum ToolError {
    /// A checked property failed (exit 1).
    Violation(String),
    /// Unreadable or invalid configuration or input file (exit 2).
    Config(String),
    /// Filesystem failure (exit 2).
    Io { path: PathBuf, source: std::io::Error },
    /// A computation exceeded its resource guard (exit 3).
    Resource(String),
}

impl ToolError {
    pub fn config(msg: impl fmt::Display) -> Self {
        ToolError::Config(msg.to_string())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        ToolError::Io { path: path.to_path_buf(), source }
    }

    /// Process exit code: 1 property violation, 2 configuration or parse
    /// error, 3 resource guard.
    pub fn exit_code(&self) -> i32 {
        match self {
            ToolError::Violation(_) => 1,
            ToolError::Config(_) | ToolError::Io { .. } => 2,
            ToolError::Resource(_) => 3,
        }
    }
}

impl fmt::Display for ToolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ToolError::Violation(msg) => write!(f, "property violation: {msg}"),
            ToolError::Config(msg) => write!(f, "invalid input: {msg}"),
            ToolError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            ToolError::Resource(msg) => write!(f, "resource limit: {msg}"),
        }
    }
}

impl std::error::Error for ToolError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            ToolError::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl From<qrs_core::decode::DecodeError> for ToolError {
    fn from(e: qrs_core::decode::DecodeError) -> Self {
        match e {
            qrs_core::decode::DecodeError::TooLarge { .. } => ToolError::Resource(e.to_string()),
            other => ToolError::config(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, ToolError>;

/// Read a whole text file.
pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| ToolError::io(path, e))
}
