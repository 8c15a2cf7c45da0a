use thiserror::Error;

/// Errors raised by instance handling and the rounding pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid instance: {0}")]
    Validation(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("LP infeasible: best capacity of {k} facilities is {capacity} < demand {demand}")]
    Infeasible {
        k: usize,
        capacity: u64,
        demand: usize,
    },

    #[error("LP solver failure: {0}")]
    Solver(String),

    #[error("contract violation: {0}")]
    Contract(String),

    /// A structural guarantee of a construction did not hold. This always
    /// indicates a bug, never bad input.
    #[error("invariant broken: {0}")]
    Invariant(String),

    #[error("rounding error: {0}")]
    Rounding(String),

    #[error("oracle guard exceeded: {0} facilities (limit 20)")]
    OracleGuard(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
