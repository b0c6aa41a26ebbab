//! Error type shared across the crate.

use std::fmt;

/// Errors raised by operations with restricted domains or iterative numerics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A precondition on the arguments was violated (out-of-range index,
    /// argument outside the support, size guard tripped, ...).
    Domain(String),
    /// The requested floating-point precision cannot support the computation.
    Precision(String),
    /// An iterative numerical procedure failed to converge.
    NonConvergence(String),
    /// Malformed textual input (rational, polynomial or multiplicity list).
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Precision(msg) => write!(f, "precision error: {msg}"),
            Error::NonConvergence(msg) => write!(f, "did not converge: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
