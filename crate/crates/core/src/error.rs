//! Error type shared by all modules of the crate.

use std::fmt;

/// Errors produced by mesh construction, assembly, linear algebra and the
/// benchmark harness.
#[derive(Debug)]
pub enum Error {
    /// An argument violates a documented precondition.
    InvalidArgument(String),
    /// Vector/matrix dimensions do not match.
    DimensionMismatch(String),
    /// A matrix expected to be symmetric positive definite is not.
    NotSpd(String),
    /// A dense/oracle routine was asked for a problem above its size guard.
    SizeLimit(String),
    /// A non-finite value (NaN/inf) appeared where finite data is required.
    NonFinite(String),
    /// Underlying I/O failure (CSV/SVG emission, CSV parsing).
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            Error::NotSpd(msg) => write!(f, "matrix is not symmetric positive definite: {msg}"),
            Error::SizeLimit(msg) => write!(f, "size guard exceeded: {msg}"),
            Error::NonFinite(msg) => write!(f, "non-finite value: {msg}"),
            Error::Io(err) => write!(f, "i/o error: {err}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
