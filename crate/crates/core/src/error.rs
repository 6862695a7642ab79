use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point (x={x}, y={y}) lies outside [0, 2pi) x [-pi, pi)")]
    OutOfRegion { x: f64, y: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("column {column} sums to {sum} instead of 1")]
    NotStochastic { column: usize, sum: f64 },

    #[error("insufficient data: need at least {needed} usable points, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("power iteration stopped after {iterations} iterations with residual {residual:e}")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("QR iteration did not converge for the active block ending at row {block} after {iterations} iterations")]
    EigenNotConverged { block: usize, iterations: usize },

    #[error("dense matrix of dimension {n} exceeds the cap {cap} (would need about {bytes} bytes)")]
    DenseCapExceeded { n: usize, cap: usize, bytes: u128 },

    #[error("Lyapunov estimate drifted by {drift:e} over the final 10% of periods (tolerance {tolerance:e})")]
    LyapunovDrift { drift: f64, tolerance: f64 },

    #[error("vector has zero norm")]
    ZeroVector,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
