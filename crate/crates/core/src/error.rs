use thiserror::Error;

/// Errors raised by the layout engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("footprint undefined for tilted object")]
    TiltedFootprint,
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("term {index} is a cross-level term: `{id}` is not a child of `{level}`")]
    CrossLevelTerm {
        index: usize,
        id: String,
        level: String,
    },
    #[error("term {index}: expected {expected} participants for {kind}, got {got}")]
    Arity {
        index: usize,
        kind: &'static str,
        expected: &'static str,
        got: usize,
    },
    #[error("unpairable set: {0}")]
    UnpairableSet(String),
    #[error("invalid pose: {0}")]
    InvalidPose(String),
    #[error("invalid extent: {0}")]
    InvalidExtent(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid term: {0}")]
    InvalidTerm(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("level `{0}` has no movable objects")]
    NoMovable(String),
    #[error("instance too large for oracle: {0}")]
    OracleTooLarge(String),
    #[error("invalid program: {0}")]
    InvalidProgram(String),
    #[error("agent fault: {0}")]
    Agent(String),
    #[error("invalid trajectory command: {0}")]
    InvalidCommand(String),
    #[error("empty track")]
    EmptyTrack,
    #[error("spec error at {location}: {message}")]
    Spec { location: String, message: String },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
