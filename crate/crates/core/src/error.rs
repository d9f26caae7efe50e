use thiserror::Error;

/// Errors raised by the spectral laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    /// Two objects live on different bases or spaces.
    #[error("incompatible spaces: {0}")]
    IncompatibleSpaces(String),

    /// A parameter lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A model or experiment configuration violates a constraint.
    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    /// The noise block does not carry enough modes for the requested level.
    #[error("reference resolution insufficient: requested {requested} noise modes, block has {available}")]
    ReferenceTooCoarse { requested: usize, available: usize },

    /// A declared noise tail does not have a finite sum.
    #[error("divergent noise tail: {0}")]
    DivergentTail(String),

    /// Not enough usable data points (e.g. for a regression).
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl LabError {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        LabError::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
