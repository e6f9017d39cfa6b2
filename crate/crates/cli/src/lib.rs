//! Batch experiment harness and one-shot solver CLI for reweighted l1
//! sparse recovery.

pub mod config;
pub mod experiments;

use std::fmt;

/// Top-level failure classes, mapped onto process exit codes by the
/// binary: configuration problems exit 2, solver failures exit 3.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Solver(String),
    Io(std::io::Error),
}

impl RunError {
    pub fn config(msg: impl Into<String>) -> Self {
        RunError::Config(msg.into())
    }

    pub fn solver(msg: impl Into<String>) -> Self {
        RunError::Solver(msg.into())
    }

    pub fn io(e: std::io::Error) -> Self {
        RunError::Io(e)
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Solver(_) | RunError::Io(_) => 3,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "{m}"),
            RunError::Solver(m) => write!(f, "{m}"),
            RunError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<rewl1_core::Error> for RunError {
    fn from(e: rewl1_core::Error) -> Self {
        RunError::Solver(e.to_string())
    }
}

impl From<config::ConfigError> for RunError {
    fn from(e: config::ConfigError) -> Self {
        RunError::Config(e.to_string())
    }
}
