use std::io;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("unknown node id `{0}`")]
    UnknownNode(String),

    #[error("node `{id}` declared twice with conflicting types `{first}` and `{second}`")]
    ConflictingType {
        id: String,
        first: String,
        second: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("node {0} has no neighbors")]
    IsolatedNode(usize),

    #[error("graph has no node with at least one neighbor")]
    NoWalkableNodes,

    #[error("walk enumeration exceeded budget of {0} tree nodes")]
    BudgetExceeded(u64),

    #[error("unsupported file format: {0}")]
    Format(String),

    #[error("truncated file: {0}")]
    Truncated(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Errors caused by bad input data or arguments rather than a failure of
    /// the computation itself.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::UnknownNode(_)
                | Error::ConflictingType { .. }
                | Error::InvalidArgument(_)
                | Error::Format(_)
                | Error::Truncated(_)
                | Error::Io(_)
        )
    }
}
