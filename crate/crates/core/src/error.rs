use thiserror::Error;

use crate::partitions::Partition;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at partition {partition}: factor {factor} vanishes")]
    Pole { partition: Partition, factor: String },
    #[error("divergent: {0}")]
    Divergent(String),
    #[error("series precision exhausted")]
    Precision,
    #[error("term budget of {0} exceeded")]
    TermBudget(usize),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
