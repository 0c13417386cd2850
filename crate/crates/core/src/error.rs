use thiserror::Error;

use crate::spaceform::Model;

/// Errors produced by the geometry routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("model mismatch: expected {expected:?}, found {found:?}")]
    ModelMismatch { expected: Model, found: Model },

    #[error("minimizing geodesic is not unique (points are antipodal)")]
    NonUniqueGeodesic,

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("point lies on the curve (distance {distance:e})")]
    OnCurve { distance: f64 },

    #[error("construction failed: {0}")]
    ConstructionFailed(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> GeomError {
    GeomError::InvalidArgument(msg.into())
}
