use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("({0}, {1}) is not an edge of the graph")]
    NotAnEdge(String, String),

    #[error("node `{0}` is already a member of the community")]
    AlreadyMember(String),

    #[error("metric `{0}` is undefined for this input")]
    UndefinedMetric(&'static str),

    #[error("community {0} is empty")]
    EmptyCommunity(usize),

    #[error("node sets differ: {0}")]
    NodeSetMismatch(String),

    #[error("manifest: {0}")]
    Manifest(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
