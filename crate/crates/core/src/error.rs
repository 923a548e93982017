use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Parameters that violate a structural or physical constraint.
    #[error("config error: {0}")]
    Config(String),
    /// Input lengths or shapes that do not match the declared parameters.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular channel: {0}")]
    Singular(String),
    /// Malformed experiment file; `path` names the offending key.
    #[error("schema error at `{path}`: {msg}")]
    Schema { path: String, msg: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

pub(crate) fn dimension<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Dimension(msg.into()))
}
