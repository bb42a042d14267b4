use thiserror::Error;

/// Errors shared by every module of the crate.
///
/// Stage failures that carry diagnostics (stalled increment searches,
/// embedding failures, pipeline aborts) have their own types in the
/// modules that produce them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("sets of size {left}x{right} exceed the exact-check cap {cap}; use sampled check")]
    ExactCapExceeded { left: usize, right: usize, cap: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("inheritance audit failed: {bad} bad vertices exceed the allowed {allowed}")]
    InheritanceAudit { bad: usize, allowed: usize },

    #[error("empty pair: no edges between the given sets")]
    EmptyPair,

    #[error("refused: {0}")]
    Refused(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
