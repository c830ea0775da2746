use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid batch: {0}")]
    InvalidBatch(String),

    #[error("corrupted state: {0}")]
    CorruptedState(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("index {index} out of range for {len} classes")]
    Index { index: usize, len: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("truncated input at byte offset {offset}: {context}")]
    Truncated { offset: usize, context: String },

    #[error("malformed header field `{field}`: {value:?}")]
    HeaderFormat { field: String, value: String },

    #[error("signal `{signal}` has digital maximum equal to digital minimum")]
    DegenerateScaling { signal: String },

    #[error("line {line}: {message}")]
    RowFormat { line: usize, message: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("channel `{requested}` not found; available channels: {}", available.join(", "))]
    ChannelNotFound { requested: String, available: Vec<String> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
