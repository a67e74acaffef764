//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConleyError {
    /// A point or parameter lies outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value is invalid; the message names the field.
    #[error("config error: {0}")]
    Config(String),

    /// A noise path was evaluated outside its sampled window.
    #[error("horizon exceeded: requested |t| = {requested:.6}, largest valid |t| = {max_abs:.6}")]
    HorizonExceeded { requested: f64, max_abs: f64 },

    /// A cocycle evaluation produced a non-finite value or left the phase space.
    #[error("numeric overflow: {0}")]
    NumericOverflow(String),

    /// An internal invariant was violated (indicates a misconfigured grid/eps).
    #[error("internal consistency error: {0}")]
    InternalConsistency(String),

    /// An I/O failure while writing or reading reports.
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, ConleyError>;

impl From<std::io::Error> for ConleyError {
    fn from(e: std::io::Error) -> Self {
        ConleyError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for ConleyError {
    fn from(e: serde_json::Error) -> Self {
        ConleyError::Io(e.to_string())
    }
}
