use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inconsistent schedule: {0}")]
    InconsistentSchedule(String),

    #[error("pole of the Gamma function at {0}")]
    Pole(Complex64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precision loss: {0}")]
    PrecisionLoss(String),

    /// The matrix is defective: both eigenvalues and eigenvectors coalesce.
    #[error("eigenvalues coalesce at {eigenvalue} (exceptional point)")]
    Coalescence {
        eigenvalue: Complex64,
        eigenvector: [Complex64; 2],
    },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("no exceptional points: {0}")]
    NoExceptionalPoint(String),

    #[error("step size underflow at t = {t} (h = {h:e})")]
    Stiffness { t: f64, h: f64 },

    #[error("amplitude {magnitude:e} exceeds the representable range at t = {t}; enable loss normalization")]
    Magnitude { t: f64, magnitude: f64 },

    #[error("asymptotic form used out of regime: {0}")]
    OutOfRegime(String),
}

pub type Result<T> = std::result::Result<T, Error>;
