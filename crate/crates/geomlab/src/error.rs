use thiserror::Error;

/// Crate-wide error type. Every variant names the violated precondition or
/// the failing stage.
#[derive(Debug, Error)]
pub enum GeomError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("topology error: {0}")]
    Topology(String),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("simplicity violated: min non-adjacent separation {min_separation:.3e} below tolerance {tolerance:.3e}")]
    Simplicity { min_separation: f64, tolerance: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("ambiguous on-curve classification: {0}")]
    AmbiguousOnCurve(String),

    #[error("collar error: {0}")]
    Collar(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("positioning failed: {0}")]
    Positioning(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("internal error (this is a bug): {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GeomError>;
