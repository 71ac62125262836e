use thiserror::Error;

/// Structural failures. A protocol that simply fails a check is not an
/// error; it produces a failing verdict with a counterexample.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("weights sum to {found}, expected 1")]
    WeightSum { found: String },

    #[error("probability {0} is outside [0, 1]")]
    ProbOutOfRange(String),

    #[error("undefined conditional: the conditioning event has zero mass")]
    UndefinedConditional,

    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),

    #[error("empty distribution")]
    EmptyDistribution,

    #[error("malformed primitive `{name}`: {reason}")]
    MalformedPrimitive { name: String, reason: String },

    #[error("primitive `{0}` has non-dyadic masses and cannot be driven by a uniform tape")]
    NonDyadic(String),

    #[error("malformed protocol `{name}`: {reason}")]
    MalformedProtocol { name: String, reason: String },

    #[error("world does not fit protocol `{name}`: {reason}")]
    WorldMismatch { name: String, reason: String },

    #[error("party {party} produced `{symbol}`, outside the {what} alphabet")]
    AlphabetViolation {
        party: char,
        symbol: String,
        what: &'static str,
    },

    #[error("transcript length {observed} differs from declared cost {declared} in world {world}")]
    CommMismatch {
        declared: usize,
        observed: usize,
        world: String,
    },

    #[error("{what} needs {required} {unit}, above the configured bound of {bound}")]
    BoundExceeded {
        what: &'static str,
        required: String,
        bound: String,
        unit: &'static str,
    },

    #[error("unknown protocol `{0}`")]
    UnknownProtocol(String),

    #[error("unsupported search: {0}")]
    UnsupportedSearch(String),

    #[error("not a binary-input binary-output primitive: `{0}`")]
    NotBinary(String),

    #[error("cannot parse `{0}` as a bit string")]
    BadSymbol(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
