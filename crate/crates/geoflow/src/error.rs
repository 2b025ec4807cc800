use thiserror::Error;

/// Errors produced by the geoflow library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("structure constants violate antisymmetry at (i={i}, j={j}, k={k})")]
    AntisymmetryViolation { i: usize, j: usize, k: usize },

    #[error("metric is not symmetric positive definite: {0}")]
    MetricNotPositiveDefinite(String),

    #[error("degenerate plane: Gram determinant {gram:e} below tolerance")]
    DegeneratePlane { gram: f64 },

    #[error("non-finite state at step {step}")]
    NonFiniteState { step: usize },

    #[error("no group model registered for algebra '{0}'")]
    UnsupportedGroupModel(String),

    #[error("no distance oracle for model '{0}'")]
    UnsupportedDistanceOracle(String),

    #[error("mode support condition violated: {0}")]
    ModeSupport(String),

    #[error("conjugate symmetry violated at mode ({0}, {1})")]
    ConjugateSymmetry(i64, i64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("internal consistency check failed: {0}")]
    InternalCheck(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
