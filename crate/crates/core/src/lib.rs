//! Quadratic extensions of quadratic fields: two exact counting engines, the
//! quartic census by Galois type and the analytic constants around it.

pub mod analytic;
pub mod arith;
pub mod census;
pub mod classgroup;
pub mod cli;
pub mod counting;
pub mod quadfield;
pub mod rayclass;
pub mod selmer;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("field with discriminant {0} is imaginary")]
    ImaginaryField(i64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("ideal class is not a square")]
    NotASquareClass,
    #[error("data error at line {line}: {msg}")]
    Data { line: usize, msg: String },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
