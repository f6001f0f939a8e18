use normspace::schema::SchemaError;
use normspace::NormError;

pub const OK: i32 = 0;
pub const PROPERTY_FAILURE: i32 = 1;
pub const INPUT: i32 = 2;
pub const DIMENSION: i32 = 3;
pub const COMPUTATION: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: INPUT,
            message: message.into(),
        }
    }
}

pub fn code_for(e: &NormError) -> i32 {
    match e {
        NormError::DimensionMismatch { .. } => DIMENSION,
        NormError::NotCauchy { .. } => PROPERTY_FAILURE,
        NormError::InvalidParameter(_)
        | NormError::InvalidBall(_)
        | NormError::NotProjectivePoint
        | NormError::GridMismatch
        | NormError::NotOnBoundary { .. }
        | NormError::NotConvex
        | NormError::SingularMap => INPUT,
        NormError::NotAnIsometry { .. }
        | NormError::InvalidIsometryStructure(_)
        | NormError::TrivialIsometry
        | NormError::TooManyVertices { .. }
        | NormError::ConstructionFailed(_) => COMPUTATION,
    }
}

impl From<NormError> for CliError {
    fn from(e: NormError) -> Self {
        CliError {
            code: code_for(&e),
            message: e.to_string(),
        }
    }
}

impl From<SchemaError> for CliError {
    fn from(e: SchemaError) -> Self {
        CliError::input(e.to_string())
    }
}
