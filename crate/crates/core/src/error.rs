use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised on malformed input or inconsistent configuration.
///
/// Failed verification checks are not errors; they are reported through the
/// various report types.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u32),

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("geometry {p}^{n} is too large for dense point tables")]
    GeometryTooLarge { p: u32, n: u32 },

    #[error("coordinate {value} at position {position} is outside [0, {p})")]
    CoordinateOutOfRange { position: usize, value: u32, p: u32 },

    #[error("expected {expected} coordinates, got {got}")]
    WrongArity { expected: usize, got: usize },

    #[error("point index {index} does not belong to a geometry with {size} points")]
    GeometryMismatch { index: u32, size: u32 },

    #[error("line direction must be nonzero")]
    ZeroDirection,

    #[error("a line needs two distinct points")]
    CoincidentPoints,

    #[error("block contains point {0} more than once")]
    RepeatedPoint(u32),

    #[error("block {block} has {got} points, expected {expected}")]
    WrongBlockSize {
        block: usize,
        expected: usize,
        got: usize,
    },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("design has no geometry; points are not group elements")]
    MissingGeometry,

    #[error("t = {t} is not supported: {reason}")]
    UnsupportedStrength { t: usize, reason: String },

    #[error("base block requires y outside the line through 0 spanned by x")]
    DegenerateBaseBlock,

    #[error("family contains the same orbit twice")]
    DuplicateOrbit,

    #[error("unsupported modulus {0} for two-parallel-line candidates (only p = 3)")]
    UnsupportedModulus(u32),

    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),

    #[error("embedded base-block table failed its checksum (got {got})")]
    CorruptEmbeddedData { got: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),
}
