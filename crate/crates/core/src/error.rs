//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the simulation and analysis operations.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// Post-selection orthogonal to pre-selection: weak value diverges.
    #[error("divergent weak value: post-selection angle is zero")]
    DivergentWeakValue,

    /// A precondition on a plain argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Grid too coarse for the requested computation.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Closed-form propagation requested outside its validity domain.
    #[error("approximation domain error: {0}")]
    ApproximationDomain(String),

    /// Exposure of an intensity map with no power.
    #[error("intensity map is identically zero")]
    EmptyIntensity,

    /// Power-law exponent outside the supported [0, 2] range.
    #[error("unsupported spectral exponent {0}")]
    UnsupportedExponent(f64),

    /// Series/frame-count mismatch when injecting drift.
    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },

    /// Frame dimensions disagree.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Cross-correlation has no usable peak (degenerate input).
    #[error("no correlation peak: {0}")]
    NoPeak(String),

    /// Calibration fit attempted with fewer than two distinct delays.
    #[error("underdetermined fit: need >= 2 distinct delay values")]
    UnderdeterminedFit,

    /// Calibration line with zero slope cannot be inverted.
    #[error("degenerate calibration: zero slope")]
    DegenerateCalibration,

    /// Series too short for the requested estimator.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Slope fit over an empty frequency/interval band.
    #[error("empty band: no points in [{lo}, {hi}]")]
    EmptyBand { lo: f64, hi: f64 },

    /// Probability profile does not sum to one.
    #[error("profile not normalized: sum deviates by {0:e}")]
    Normalization(f64),

    /// Malformed input file.
    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },

    /// Underlying I/O failure.
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
