use thiserror::Error;

/// Errors raised by the numerical pipeline and the file interfaces.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field has {got} samples but the grid has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },

    #[error("node index {index} out of range for a grid of {len} nodes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),

    #[error(
        "degree {lmax} needs a grid exact to degree {needed}, grid band limit is {band_limit}"
    )]
    GridTooCoarse {
        lmax: usize,
        needed: usize,
        band_limit: usize,
    },

    #[error("field is not antipodally odd (even part {even_norm:.3e} exceeds tolerance {tolerance:.1e})")]
    ParityViolation { even_norm: f64, tolerance: f64 },

    #[error("width parameter must be positive, got {0}")]
    NonPositiveWidth(f64),

    #[error("w = {w} is below the width floor w0 = {w0}")]
    BelowFloor { w: f64, w0: f64 },

    #[error("objective undefined for zero coefficients")]
    ZeroCoefficients,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
