use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// How a failure should be treated by callers that need to classify it
/// (the CLI maps these onto exit codes).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or invalid user input.
    Input,
    /// Input was well formed but an operation's precondition does not hold.
    Precondition,
    /// An internal consistency check failed.
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero vector has no primitive direction")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cannot parse rational {text:?}: {reason}")]
    ParseRational { text: String, reason: String },
    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),
    #[error("polytope file: {0}")]
    Format(String),
    #[error("polytope is not simple: {0}")]
    NotSimple(String),
    #[error("matrix is not unimodular (|det| = {0})")]
    NotUnimodular(String),
    #[error("edge directions at vertex are not unique")]
    DegenerateVertex,
    #[error("face {face:?} has a facet with label > 1; stabilizer bookkeeping is unsupported there")]
    LabeledFaceUnsupported { face: Vec<usize> },
    #[error("level {0} is not regular (a vertex lies on it)")]
    NotRegularLevel(String),
    #[error("operation leaves an empty polytope")]
    EmptyResult,
    #[error("blow-up depth {0} is too large for this vertex")]
    BlowupTooLarge(String),
    #[error("vertex cannot be blown up: {0}")]
    VertexNotBlowable(String),
    #[error("chamber interpolation mismatch at s = {0}")]
    InterpolationMismatch(String),
    #[error("wall is not a simple crossing: {0}")]
    WallNotSimpleCrossing(String),
    #[error("input point is fixed by the action")]
    FixedPointInput,
    #[error("floating point overflow: {0}")]
    Overflow(String),
    #[error("finite-difference step too large: {0}")]
    StepTooLarge(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal invariant failed: {0}")]
    Internal(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            ZeroVector | DimensionMismatch { .. } | ParseRational { .. } | InvalidPolytope(_)
            | Format(_) | NotUnimodular(_) => ErrorClass::Input,
            InterpolationMismatch(_) | Internal(_) => ErrorClass::Internal,
            _ => ErrorClass::Precondition,
        }
    }
}
