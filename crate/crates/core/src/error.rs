//! Error type shared across the crate.

use std::fmt;
use std::io;
use std::path::PathBuf;

/// Errors produced by table construction, samplers, oracles and the harness.
#[derive(Debug)]
pub enum Error {
    /// A function table or state vector with zero entries was requested.
    EmptyDomain,
    /// A point outside `0..size` was used to index a table or oracle.
    IndexOutOfRange { index: usize, size: usize },
    /// Two objects that must share a domain size do not.
    SizeMismatch { expected: usize, found: usize },
    /// A table expected to be a bijection is not; `role` names the offender.
    NotABijection { role: &'static str },
    /// A collision profile violates its invariants.
    InvalidProfile(String),
    /// A parameter is outside its documented range.
    InvalidParameter(String),
    /// An operation's precondition does not hold for the given inputs.
    FailedPrecondition(String),
    /// Text input (table, profile, config or CSV) could not be parsed.
    Parse(String),
    /// An underlying I/O operation failed.
    Io { path: PathBuf, source: io::Error },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyDomain => write!(f, "domain must contain at least one point"),
            Error::IndexOutOfRange { index, size } => {
                write!(f, "index {index} out of range for domain of size {size}")
            }
            Error::SizeMismatch { expected, found } => {
                write!(f, "domain size mismatch: expected {expected}, found {found}")
            }
            Error::NotABijection { role } => write!(f, "{role} is not a bijection"),
            Error::InvalidProfile(msg) => write!(f, "invalid collision profile: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::FailedPrecondition(msg) => write!(f, "precondition failed: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::Io { path, source } => write!(f, "i/o error on {}: {source}", path.display()),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
