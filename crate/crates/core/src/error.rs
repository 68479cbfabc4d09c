use thiserror::Error;

/// Failure modes shared by every solver in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// The problem is well formed but cannot be handled by the requested solver.
    #[error("configuration error: {0}")]
    Config(String),
    /// A numerical procedure failed (no convergence, missing roots, guard tripped).
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl FlowError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        FlowError::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        FlowError::Config(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        FlowError::Numeric(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, FlowError>;
