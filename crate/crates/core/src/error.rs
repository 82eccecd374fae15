use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(
        "invalid entry at position {index}: {value} (entries must be finite and strictly positive)"
    )]
    InvalidEntry { index: usize, value: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error(
        "power iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    Convergence { iterations: usize, residual: f64 },

    #[error("cannot aggregate an empty cell")]
    EmptyCell,

    #[error("cell (order {order}, D {deviation}): {source}")]
    Cell {
        order: usize,
        deviation: f64,
        #[source]
        source: Box<Error>,
    },
}
