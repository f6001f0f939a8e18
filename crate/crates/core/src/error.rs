use thiserror::Error;

/// Errors produced by the normspace library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a projective point: zero vector")]
    NotProjectivePoint,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid ball: {0}")]
    InvalidBall(BallViolation),

    #[error("grid mismatch: profiles live on different grids")]
    GridMismatch,

    #[error("point is not on the boundary of the ball (gauge {gauge})")]
    NotOnBoundary { gauge: f64 },

    #[error("polyhedral approximation requires a convex ball")]
    NotConvex,

    #[error("sequence not Cauchy at tolerance {tol}")]
    NotCauchy { tol: f64 },

    #[error("singular linear map")]
    SingularMap,

    #[error("not an isometry at this resolution (max deviation {deviation:e})")]
    NotAnIsometry { deviation: f64 },

    #[error("not an isometry of any quasinorm ({0})")]
    InvalidIsometryStructure(String),

    #[error("separation defined for nontrivial isometries")]
    TrivialIsometry,

    #[error("too many vertices ({count} > {limit}); use a grid-based heuristic")]
    TooManyVertices { count: usize, limit: usize },

    #[error("construction failed: {0}")]
    ConstructionFailed(String),
}

/// The clause of the ball-validation criterion that a vertex list violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallViolation {
    NotBalanced,
    NotFullDimensional,
    NonFinite,
    Empty,
}

impl std::fmt::Display for BallViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BallViolation::NotBalanced => f.write_str("not balanced"),
            BallViolation::NotFullDimensional => {
                f.write_str("origin not interior / not full-dimensional")
            }
            BallViolation::NonFinite => f.write_str("non-finite vertex coordinate"),
            BallViolation::Empty => f.write_str("empty vertex list"),
        }
    }
}

pub type Result<T, E = NormError> = std::result::Result<T, E>;
