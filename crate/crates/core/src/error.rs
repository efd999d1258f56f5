use thiserror::Error;

/// Errors raised by geometry, barrier construction, and simulation setup.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("segment parameter {0} outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("segment endpoints coincide")]
    DegenerateSegment,
    #[error("box corners must satisfy min < max componentwise")]
    InvalidBox,
    #[error("propeller disk radius must be positive and finite, got {0}")]
    InvalidFootprint(f64),
    #[error("point ({0}, {1}) lies strictly inside the obstacle")]
    Penetration(f64, f64),
    #[error("nearest propeller center touches the obstacle; separation direction undefined")]
    ZeroSeparation,
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon vertex {0} repeats its predecessor")]
    RepeatedVertex(usize),
    #[error("invalid kernel parameter `{0}`: must be positive and finite")]
    InvalidKernel(&'static str),
    #[error("class-K gain must be positive and finite, got {0}")]
    InvalidGain(f64),
    #[error("noise budget must be positive and finite, got {0}")]
    InvalidBudget(f64),
    #[error("empty point set")]
    EmptyPointSet,
    #[error("expected {expected} accumulators, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
