//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration value or inconsistent setup.
    #[error("configuration error: {0}")]
    Config(String),

    /// Shape mismatch between parameters, inputs, or gradients.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Non-finite value encountered where a finite one is required.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// API misuse such as an empty minibatch.
    #[error("usage error: {0}")]
    Usage(String),

    /// A curriculum or run precondition is not met.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unknown scenario preset `{0}` (known: {known})", known = crate::fault::ScenarioSpec::PRESET_NAMES.join(", "))]
    UnknownScenario(String),

    #[error("cannot read config {path}: {message}")]
    ConfigRead { path: PathBuf, message: String },

    #[error("config {path}: {message}")]
    ConfigParse { path: PathBuf, message: String },

    #[error("checkpoint format version {found} is not supported (expected {expected})")]
    CheckpointVersion { found: u32, expected: u32 },

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    /// The simulated aircraft left the valid flight envelope.
    #[error("simulation aborted at t={time:.2}s: {reason}")]
    Abort { time: f64, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
