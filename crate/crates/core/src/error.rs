use thiserror::Error;

/// Failures raised by the solver kernels and physical models.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: String,
        found: String,
    },

    #[error("{context} requires a square matrix, got {rows}x{cols}")]
    NotSquare {
        context: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("lifted state of length {0} is not a perfect square")]
    NotPerfectSquare(usize),

    #[error("rate of {what} must be nonnegative, got {rate}")]
    NegativeRate { what: String, rate: f64 },

    #[error("matrix is not Hermitian: deviation {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("numerical range exceeded: {0}")]
    NumericalRange(String),

    #[error("rk4 step guard violated: step {step:e} times generator norm {norm:e} exceeds {limit}")]
    StepGuard { step: f64, norm: f64, limit: f64 },

    #[error("system dimension {dim} exceeds the dense lifting limit of {limit}")]
    TooLarge { dim: usize, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn mismatch(
        context: impl Into<String>,
        expected: impl ToString,
        found: impl ToString,
    ) -> Self {
        Error::DimensionMismatch {
            context: context.into(),
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
