use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced by the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vector {index} has zero Euclidean norm")]
    ZeroNorm { index: usize },

    #[error("dimension mismatch at vector {index}: expected {expected}, found {found}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("could not place {wanted} sense centroids with cosine separation {separation} in {dim} dimensions (placed {placed})")]
    SeparationInfeasible {
        wanted: usize,
        placed: usize,
        separation: f64,
        dim: usize,
    },

    #[error("trajectory needs at least 2 checkpoints with a defined Martin correlation, found {0}")]
    InsufficientCheckpoints(usize),

    #[error("duplicate checkpoint step {0}")]
    DuplicateStep(u64),

    #[error(transparent)]
    Format(#[from] FormatError),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// True for errors caused by unreadable or malformed input files.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Format(_) | Error::Io(_))
    }
}

/// Corpus decoding failures. Offsets are byte positions in the stream.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic {found:?}, expected \"LEXL\"")]
    BadMagic { found: [u8; 4] },

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),

    #[error("corpus dimension must be positive")]
    ZeroDimension,

    #[error("stream truncated at byte offset {offset} while reading {what}")]
    Truncated { offset: u64, what: &'static str },

    #[error("token at byte offset {offset} is not valid UTF-8")]
    InvalidUtf8 { offset: u64 },

    #[error("empty token in record {record}")]
    EmptyToken { record: u64 },

    #[error("record {record} has a non-finite embedding component")]
    NonFinite { record: u64 },

    #[error("record {record} has a zero-norm embedding")]
    ZeroEmbedding { record: u64 },

    #[error("record {record} breaks (doc_id, pos) ordering")]
    Unordered { record: u64 },

    #[error("header declares {declared} records but stream has trailing data at byte offset {offset}")]
    RecordCountMismatch { declared: u64, offset: u64 },

    #[error("token longer than {max} bytes cannot be encoded", max = u16::MAX)]
    TokenTooLong,

    #[error("value out of range for the wire format: {0}")]
    OutOfRange(&'static str),

    #[error("line {line}: {message}")]
    Jsonl { line: usize, message: String },
}
