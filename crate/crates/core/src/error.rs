//! Error taxonomy shared by the whole crate.
//!
//! The variants mirror the process exit codes of the CLI: configuration
//! problems, violated preconditions, and numerical failures are kept apart so
//! callers can react differently to each.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller passed structurally invalid arguments (dimension mismatch,
    /// non-homogeneous polynomial where one is required, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A documented precondition of an operation does not hold for the given
    /// inputs (insufficient padding, grid mismatch, missing envelope, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Bad configuration data (files, parse errors, inconsistent specs).
    #[error("configuration error: {0}")]
    Config(String),

    /// A numerical procedure failed or refused to produce a value
    /// (quadrature non-convergence, singular symbol, stationarity violation).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A configured resource budget would be exceeded.
    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}
