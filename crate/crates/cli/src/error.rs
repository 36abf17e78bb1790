use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("unknown {what} `{name}`; expected one of: {expected}")]
    Unknown { what: &'static str, name: String, expected: String },
    #[error("writing {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Library(String),
}

impl CliError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Field { field: field.into(), message: message.into() }
    }

    pub fn library(e: impl std::fmt::Display) -> Self {
        CliError::Library(e.to_string())
    }
}
