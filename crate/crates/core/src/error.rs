use thiserror::Error;

use crate::dynamics::Trajectory;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate class: the zero class is not allowed here")]
    DegenerateClass,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionError { expected: usize, found: usize },

    #[error("outside domain: {0}")]
    OutsideDomain(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid pair: {0}")]
    InvalidPair(String),

    /// The flow left the model's domain; the trajectory up to the exit is kept.
    #[error("trajectory left the domain at t = {}", .0.times.last().copied().unwrap_or(0.0))]
    DomainEscape(Box<Trajectory>),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("family mismatch: {0}")]
    FamilyMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionError { expected, found })
    }
}
