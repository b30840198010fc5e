//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Two net positions live in different active dimensions and cannot be compared.
    #[error("dimension mismatch: expected p = {expected}, got p = {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A summation path is not monotone under the rectangle order.
    #[error("path is not monotone under the rectangle order at step {step}")]
    NonMonotonePath { step: usize },

    /// A point does not supply a coordinate the function depends on.
    #[error("point has {got} coordinates but coordinate {needed} is required")]
    MissingCoordinate { needed: usize, got: usize },

    /// A coefficient was requested outside the declared degree box.
    #[error("coefficient index outside the declared degree box")]
    CoefficientOutsideBox,

    /// A grid is too coarse to resolve the requested frequency.
    #[error("aliasing: |n_{coord}| = {degree} needs a grid of more than {grid} nodes on that axis")]
    Aliasing {
        coord: usize,
        degree: i64,
        grid: usize,
    },

    /// A declared quadrature grid cannot reach the requested accuracy.
    #[error("quadrature resolution insufficient: axis {coord} needs at least {needed} nodes, got {got}")]
    ResolutionInsufficient {
        coord: usize,
        needed: usize,
        got: usize,
    },

    /// Array shapes do not line up.
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: Vec<usize>,
        got: Vec<usize>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
