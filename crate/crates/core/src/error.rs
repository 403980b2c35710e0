use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("overflow evaluating at z = {z}; log|value| = {log_abs}")]
    Overflow { z: Complex64, log_abs: f64 },

    #[error("evaluator failed at sample {index} (z = {z})")]
    EvaluatorFailure { index: usize, z: Complex64 },

    #[error("not a member: negative-coefficient mass {mass:e} exceeds {threshold:e}")]
    NotAMember { mass: f64, threshold: f64 },

    #[error("point {z} lies outside the open disc |z - {center}| < {radius}")]
    OutOfDisc {
        z: Complex64,
        center: Complex64,
        radius: f64,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("numerical breakdown: Gram matrix indefinite (min eigenvalue {min_eigenvalue:e}, scale {scale:e})")]
    NumericalBreakdown { min_eigenvalue: f64, scale: f64 },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("disc construction failed: boundary violation {violation:e}")]
    ConstructionFailure { violation: f64 },

    #[error("no admissible disc: best margins ({margin_z:.3e}, {margin_w:.3e}), sup|Phi| = {sup_abs:.3}")]
    SearchFailure {
        margin_z: f64,
        margin_w: f64,
        sup_abs: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
