use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("coupling calibration failed: {0}")]
    Calibration(String),

    #[error("inverse Laplace transform did not converge: {0}")]
    NonConvergence(String),

    #[error("contour violation: {0}")]
    ContourViolation(String),

    #[error("imaginary residue too large: |Im| = {imag:e}, bound = {bound:e}")]
    ImaginaryResidue { imag: f64, bound: f64 },

    #[error("truncation budget exceeded: {0}")]
    Truncation(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("trace extrapolation did not converge: {0}")]
    TraceExtrapolation(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
