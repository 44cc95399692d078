use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid parameter must be in 1..={max}, got {n}")]
    InvalidGrid { n: usize, max: usize },

    #[error("expected {expected} grid values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("grid functions live on different grids (n={left} vs n={right})")]
    GridMismatch { left: usize, right: usize },

    #[error("{what} index {index} outside {min}..={max}")]
    IndexOutOfRange {
        what: &'static str,
        index: i64,
        min: i64,
        max: i64,
    },

    #[error("non-finite value at space index {index}")]
    NonFinite { index: i64 },

    #[error("explicit stepper overflow at step {step}: max modulus {max_modulus:e} exceeds {limit:e}")]
    Overflow {
        step: usize,
        max_modulus: f64,
        limit: f64,
    },

    #[error("query time must be positive, got {0}")]
    NonPositiveTime(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("grid parameter n={n} exceeds the limit {limit} for {operation}")]
    SizeGuard {
        operation: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("quadrature did not reach tolerance {tolerance:e} (estimate {estimate:e} after {intervals} intervals)")]
    QuadratureNotConverged {
        tolerance: f64,
        estimate: f64,
        intervals: usize,
    },
}
