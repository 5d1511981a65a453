use thiserror::Error;

/// Errors raised while building profiles, integrating them, or evaluating
/// geometry on the chart.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("profile is not positive on [0, 1): P({witness_t}) = {value:e}")]
    PositivityViolation { witness_t: f64, value: f64 },

    #[error("profile rejected: {0}")]
    InvalidProfile(String),

    #[error("h' did not reach zero before t_max = {t_max}")]
    EndpointNotFound { t_max: f64 },

    #[error("energy invariant drifted to {drift:e} at t = {t} (tolerance {tol:e})")]
    EnergyDrift { t: f64, drift: f64, tol: f64 },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("h' became negative at t = {t} before the endpoint")]
    NotMonotone { t: f64 },

    #[error("t = {t} outside the admissible range [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("metric is not positive definite at t = {t}")]
    NotPositiveDefinite { t: f64 },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate QCH Gram matrix (condition number {condition:e})")]
    DegenerateGram { condition: f64 },

    #[error("zero vector")]
    ZeroVector,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("at point {index} (t = {t}): {source}")]
    AtPoint {
        index: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
