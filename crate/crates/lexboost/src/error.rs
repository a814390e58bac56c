use thiserror::Error;

/// Errors produced by indexing, scoring, graph construction, fusion and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty corpus: at least one document is required")]
    EmptyCorpus,

    #[error("duplicate doc id: {0:?}")]
    DuplicateDocId(String),

    #[error("empty doc id")]
    EmptyDocId,

    #[error("unknown doc id: {0:?}")]
    UnknownDocId(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("corrupt {what} file: {detail}")]
    Corrupt { what: &'static str, detail: String },

    #[error("unsupported {what} file version {found} (expected {expected})")]
    VersionMismatch {
        what: &'static str,
        expected: u32,
        found: u32,
    },

    #[error("missing embedding for doc id {0:?}")]
    MissingEmbedding(String),

    #[error("duplicate embedding for doc id {0:?}")]
    DuplicateEmbedding(String),

    #[error("embedding dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("zero vector for doc id {0:?}")]
    ZeroVector(String),

    #[error("corpus too small to build a neighbor graph: need at least 2 documents")]
    CorpusTooSmall,

    #[error("requested {n} neighbors but graph stores only k={k}")]
    NeighborCountExceedsK { n: usize, k: usize },

    #[error("graph built over {graph_docs} documents but index has {index_docs}")]
    GraphCorpusMismatch {
        graph_docs: usize,
        index_docs: usize,
    },

    #[error("missing scorer context: missing_policy=exact_on_demand needs query, model and index")]
    MissingScorerContext,

    #[error("per-query value sequences have different lengths: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },

    #[error("paired t-test needs at least 2 observations, got {0}")]
    TooFewObservations(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn corrupt(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Corrupt {
            what,
            detail: detail.into(),
        }
    }

    pub(crate) fn parse(path: &str, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.to_string(),
            line,
            msg: msg.into(),
        }
    }
}
