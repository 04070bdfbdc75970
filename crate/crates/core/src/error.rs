use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Data,
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: unknown type or relation `{name}`")]
    UnknownType { line: usize, name: String },
    #[error("line {line}: {detail}")]
    SchemaViolation { line: usize, detail: String },
    #[error("line {line}: expected {expected} tab-separated columns, found {found}")]
    MalformedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: unparseable date `{value}`")]
    BadDate { line: usize, value: String },
    #[error("line {line}: attribute row references undeclared node `{node}`")]
    UnknownNode { line: usize, node: String },
    #[error("edge file contains no triples")]
    EmptyGraph,
    #[error("graph is already augmented with inverse relations")]
    AlreadyAugmented,
    #[error("operation requires a graph augmented with inverse relations")]
    NotAugmented,
    #[error("{op}: shape mismatch {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("non-finite gradient in parameter `{name}`")]
    NonFiniteGradient { name: String },
    #[error("dropout rate {0} outside [0, 1)")]
    BadRate(f64),
    #[error("temporal encoding width {0} is odd")]
    OddDim(usize),
    #[error("head count {heads} does not divide width {dim}")]
    HeadWidth { dim: usize, heads: usize },
    #[error("model kind mismatch: expected {expected}, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("cannot corrupt triple: endpoint types `{head_type}` and `{tail_type}` have a single node")]
    TypeExhausted { head_type: String, tail_type: String },
    #[error("loss became non-finite at epoch {epoch}")]
    DivergedLoss { epoch: usize },
    #[error("relation `{relation}` has {count} triples, at least 6 required for a 5:1 split")]
    RelationTooSmall { relation: String, count: usize },
    #[error("no test triples for use case {0}")]
    EmptyTestSet(&'static str),
    #[error("infeasible counts for `{relation}`: {detail}")]
    InfeasibleCounts { relation: String, detail: String },
    #[error("config line {line}: key `{key}`: {msg}")]
    Config {
        line: usize,
        key: String,
        msg: String,
    },
    #[error("invalid `{key}`: {msg}")]
    InvalidConfig { key: String, msg: String },
    #[error("{0}")]
    Guard(String),
    #[error("snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Config { .. }
            | Error::InvalidConfig { .. }
            | Error::Guard(_)
            | Error::KindMismatch { .. } => {
                ErrorCategory::Config
            }
            Error::NonFiniteGradient { .. }
            | Error::DivergedLoss { .. }
            | Error::ShapeMismatch { .. } => ErrorCategory::Numeric,
            _ => ErrorCategory::Data,
        }
    }

    pub fn config(line: usize, key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            line,
            key: key.into(),
            msg: msg.into(),
        }
    }
}
