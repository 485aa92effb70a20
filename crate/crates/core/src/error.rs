use std::fmt;
use std::io;

/// Convenience alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error category, stable across releases.
///
/// Used by the CLI to pick exit codes and by the C ABI to map errors onto
/// status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    InvalidArgument,
    NotPrime,
    Overflow,
    ModulusMismatch,
    NotInvertible,
    IdOutOfRange,
    DigitOutOfRange,
    DimensionMismatch,
    SingularMatrix,
    GenerationFailed,
    Format,
    Integrity,
    Version,
    Capacity,
    UnknownValue,
    MissingColumn,
    IdAboveVocab,
    Io,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("0 has no multiplicative inverse mod {modulus}")]
    NotInvertible { modulus: u64 },

    #[error("id {id} out of range: capacity is {capacity}")]
    IdOutOfRange { id: u128, capacity: u128 },

    #[error("digit {digit} at position {position} out of range for modulus {modulus}")]
    DigitOutOfRange {
        digit: u64,
        position: usize,
        modulus: u64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular mod {modulus}: no pivot in column {column}")]
    SingularMatrix { column: usize, modulus: u64 },

    #[error("failed to draw an invertible matrix after {attempts} attempts")]
    GenerationFailed { attempts: u32 },

    #[error("format error: {0}")]
    Format(String),

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("unsupported format_version {found} (supported: {supported})")]
    Version { found: u64, supported: u32 },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("row {row}, column {column:?}: value {value:?} is not in the vocabulary")]
    UnknownValue {
        column: String,
        row: u64,
        value: String,
    },

    #[error("missing column {0:?}")]
    MissingColumn(String),

    #[error("row {row}, column {column:?}: decoded id {id} is outside the vocabulary (size {vocab_size})")]
    IdAboveVocab {
        column: String,
        row: u64,
        id: u128,
        vocab_size: u64,
    },

    /// An element-level error raised while processing one item of a batch.
    #[error("batch element {index}: {source}")]
    Batch {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    /// An error tied to a single cell of a delimited file.
    #[error("row {row}, column {column:?}: {source}")]
    Cell {
        column: String,
        row: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidArgument(_) => ErrorKind::InvalidArgument,
            Error::NotPrime(_) => ErrorKind::NotPrime,
            Error::Overflow(_) => ErrorKind::Overflow,
            Error::ModulusMismatch { .. } => ErrorKind::ModulusMismatch,
            Error::NotInvertible { .. } => ErrorKind::NotInvertible,
            Error::IdOutOfRange { .. } => ErrorKind::IdOutOfRange,
            Error::DigitOutOfRange { .. } => ErrorKind::DigitOutOfRange,
            Error::DimensionMismatch { .. } => ErrorKind::DimensionMismatch,
            Error::SingularMatrix { .. } => ErrorKind::SingularMatrix,
            Error::GenerationFailed { .. } => ErrorKind::GenerationFailed,
            Error::Format(_) => ErrorKind::Format,
            Error::Integrity(_) => ErrorKind::Integrity,
            Error::Version { .. } => ErrorKind::Version,
            Error::Capacity(_) => ErrorKind::Capacity,
            Error::UnknownValue { .. } => ErrorKind::UnknownValue,
            Error::MissingColumn(_) => ErrorKind::MissingColumn,
            Error::IdAboveVocab { .. } => ErrorKind::IdAboveVocab,
            Error::Batch { source, .. } | Error::Cell { source, .. } => source.kind(),
            Error::Io { .. } => ErrorKind::Io,
        }
    }

    /// Index of the failing element when the error came out of a batch call.
    pub fn batch_index(&self) -> Option<usize> {
        match self {
            Error::Batch { index, .. } => Some(*index),
            _ => None,
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn at_index(self, index: usize) -> Self {
        Error::Batch {
            index,
            source: Box::new(self),
        }
    }
}
