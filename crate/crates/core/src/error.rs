use thiserror::Error;

/// Errors reported by every module of the crate.
///
/// Variants follow the failure classes of the operations: malformed
/// structures, bad caller input, exhausted search budgets, parameter
/// preconditions, broken promises and breached internal invariants.
#[derive(Debug, Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("resource error: {0}")]
    Resource(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("promise violation: {0}")]
    PromiseViolation(String),
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),
    #[error("table incomplete: {0}")]
    TableIncomplete(String),
    /// A proven invariant failed at runtime. Always an implementation bug
    /// or a violated precondition the caller skipped; carries the trace.
    #[error("internal invariant breached: {0}")]
    Internal(String),
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    /// Strips stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn in_stage(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }
}
