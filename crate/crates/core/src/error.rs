use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid model spec: {0}")]
    InvalidSpec(String),
    #[error("class {class} has {count} points, need at least 2")]
    InsufficientClassData { class: usize, count: usize },
    #[error("operation not supported: {0}")]
    Unsupported(String),
    #[error("estimation failed: {0}")]
    EstimationFailed(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn spec(msg: impl Into<String>) -> Self {
        Error::InvalidSpec(msg.into())
    }
}
