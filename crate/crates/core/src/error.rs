use thiserror::Error;

use crate::executor::ExecError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("stack underflow: close at element {position} has no matching open")]
    Underflow { position: usize },

    #[error("input of {n} elements exceeds the two-dispatch limit of {limit} (w={w}, k={k})")]
    InputTooLarge { n: usize, limit: usize, w: usize, k: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: `end` without a matching open")]
    SceneUnderflow { line: usize },

    #[error(transparent)]
    Exec(#[from] ExecError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
