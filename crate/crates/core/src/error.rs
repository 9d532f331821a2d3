use thiserror::Error;

/// Errors raised by the numerical layers and the command-line front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("trace is {trace}, expected 1")]
    NotUnitTrace { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("bad dimension: expected {expected}, got {actual}")]
    BadDimension { expected: usize, actual: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("Kraus set is not trace preserving (completeness deviation {deviation:e})")]
    NotTracePreserving { deviation: f64 },

    #[error("state is not pure (purity {purity})")]
    NotPure { purity: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("distribution does not sum to 1 (sum {sum})")]
    NotNormalized { sum: f64 },

    #[error("invalid X-state: {0}")]
    InvalidXState(String),

    #[error("spectrum of the first state is not majorized by the second")]
    NotMajorized,

    #[error("phase-flip probability {0} outside [0, 1]")]
    GammaOutOfRange(f64),

    #[error("relation is singular at gamma = 1/2")]
    GammaAtHalf,

    #[error("unknown relation `{0}`")]
    UnknownRelation(String),

    #[error("integrator error estimate {estimate:e} exceeds 1e-6")]
    StepTooCoarse { estimate: f64 },

    #[error("negative square-root argument {0:e}")]
    NegativeRadicand(f64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
