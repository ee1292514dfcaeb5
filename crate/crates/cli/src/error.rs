//! Harness-level errors: configuration problems, I/O, and engine failures.

use std::path::PathBuf;

/// Anything that can stop a benchmark command.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// The configuration file could not be read.
    #[error("cannot read config {path}: {source}")]
    ConfigRead {
        path: PathBuf,
        source: std::io::Error,
    },

    /// The configuration file failed to parse or used unknown keys.
    #[error("invalid config: {0}")]
    ConfigParse(#[from] toml::de::Error),

    /// The configuration parsed but violates a documented constraint.
    #[error("config constraint violated: {0}")]
    ConfigInvalid(String),

    /// A required config section is missing for the requested command.
    #[error("config section [{0}] is required by this command")]
    MissingSection(&'static str),

    /// Output files could not be written.
    #[error("cannot write {path}: {source}")]
    OutputWrite {
        path: PathBuf,
        source: std::io::Error,
    },

    /// The numeric engine rejected a run.
    #[error("engine error: {0}")]
    Engine(#[from] matfield::Error),

    /// A self-test check failed.
    #[error("selftest failed: {0}")]
    Selftest(String),
}

pub type Result<T> = std::result::Result<T, CliError>;
