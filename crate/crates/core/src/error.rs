use thiserror::Error;

/// Errors produced by the formation toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Structural problem with a graph, framework, or argument shapes.
    #[error("validation error: {0}")]
    Validation(String),

    /// A numeric routine was called outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The desired formation cannot be realized or fails a design condition.
    #[error("invalid formation spec: {0}")]
    Spec(String),

    #[error("integration error: {0}")]
    Integration(String),

    /// Malformed configuration or data file.
    #[error("parse error: {0}")]
    Parse(String),

    /// Well-formed configuration that breaks a schema rule.
    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
