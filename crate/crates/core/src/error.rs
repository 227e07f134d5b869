use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the code construction, codec, and stream layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("count table covers indices up to {max_index}, but {requested} was requested")]
    TableTooShort { requested: isize, max_index: usize },

    #[error("expected {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("index {index} is outside [0, {cardinality})")]
    IndexOutOfRange { index: String, cardinality: String },

    /// A pattern `1 0^y 1` with `1 <= y <= x` was found. `offset` is the
    /// position of the leading `1`, counted from the left-most bit.
    #[error("forbidden pattern 1{zeros}1 at bit offset {offset}", zeros = "0".repeat(*.zeros))]
    ConstraintViolation { offset: usize, zeros: usize },

    /// The word satisfies the constraint but is not the image of any message.
    #[error("codeword index {index} is not in the message range [1, {max}]")]
    Corrupted { index: String, max: String },

    #[error("stream of {bits} bits is not n*{m} + (n-1)*{x} for any n >= 1")]
    Framing { bits: usize, m: usize, x: usize },

    #[error("bridge after codeword {ordinal} at bit offset {offset} does not match the bridging rule")]
    BridgeMismatch { ordinal: usize, offset: usize },

    #[error("codeword {ordinal}: {source}")]
    InCodeword {
        ordinal: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("exhaustive enumeration refused: m = {m} exceeds the limit of {limit}")]
    OracleLimit { m: usize, limit: usize },

    #[error("malformed frame: {0}")]
    BadFrame(String),
}

impl Error {
    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }

    /// True for errors caused by the data rather than by the caller's setup.
    pub fn is_data_error(&self) -> bool {
        match self {
            Error::ConstraintViolation { .. }
            | Error::Corrupted { .. }
            | Error::Framing { .. }
            | Error::BridgeMismatch { .. }
            | Error::BadFrame(_) => true,
            Error::InCodeword { source, .. } => source.is_data_error(),
            _ => false,
        }
    }
}
