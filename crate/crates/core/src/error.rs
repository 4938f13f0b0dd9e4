use thiserror::Error;

/// Errors raised by the distribution kernels, operators and sweep harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyaError {
    /// Parameters violate `a + (n-1)c >= 0`, `b + (n-1)c >= 0`, or basic
    /// range requirements. Signals a caller bug.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("brute-force enumeration limited to n <= {max}, got n = {n}")]
    SizeLimit { n: usize, max: usize },

    #[error("{what} = {value} out of range {range}")]
    OutOfRange {
        what: &'static str,
        value: i64,
        range: String,
    },

    #[error("x = {0} must lie strictly inside (0, 1)")]
    InvalidX(String),

    /// The replacement parameter is not an interior point of the admissible range.
    #[error("c = {c} is not interior: need c >= {min} + {margin:e}")]
    BoundaryParams { c: f64, min: f64, margin: f64 },

    #[error("function `{0}` is not declared convex")]
    NonConvexFunction(String),

    #[error("unknown function id `{0}`")]
    UnknownFunction(String),

    /// Two raw interlacing values coincided. Never expected for 0 < x < 1.
    #[error("interlacing tie: value {value} produced twice (n = {n}, k = {k}, x = {x})")]
    InterlaceTie {
        n: usize,
        k: usize,
        x: String,
        value: i64,
    },

    #[error("invalid c grid: {0}")]
    InvalidGrid(String),

    #[error("config invalid at {cell}: {reason}")]
    ConfigInvalid { cell: String, reason: String },

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("malformed report: {0}")]
    Report(String),
}

pub type Result<T> = std::result::Result<T, PolyaError>;
