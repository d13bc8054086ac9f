use std::path::PathBuf;

use crate::lexer::LexError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library reports. All variants are input or validation
/// problems except `Internal`.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: invalid UTF-8")]
    InvalidUtf8 { line: usize },

    #[error("line {line}: empty id")]
    EmptyId { line: usize },

    #[error("duplicate id {id:?} on lines {first_line} and {second_line}")]
    DuplicateId {
        id: String,
        first_line: usize,
        second_line: usize,
    },

    #[error("line {line}: empty target for id {id:?}")]
    EmptyTarget { id: String, line: usize },

    #[error("line {line}: unknown partition {label:?} (expected train, valid or test)")]
    UnknownPartition { line: usize, label: String },

    #[error("corpus has no {0} samples")]
    MissingPartition(&'static str),

    #[error("sample {id:?}: {source}")]
    Lex {
        id: String,
        #[source]
        source: LexError,
    },

    #[error("embedding {id:?}: expected dimension {expected}, found {found}")]
    DimensionMismatch {
        id: String,
        expected: usize,
        found: usize,
    },

    #[error("embedding {id:?} contains a non-finite value")]
    NonFinite { id: String },

    #[error("embedding id {0:?} is not in the corpus")]
    UnknownId(String),

    #[error("{what} missing for {} id(s): {}", .ids.len(), preview(.ids))]
    MissingIds { what: &'static str, ids: Vec<String> },

    #[error("zero-variance input: {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("complexity range {range} selects no train samples out of {n}; widen the range")]
    EmptySelection { range: String, n: usize },

    #[error("cluster {cluster} out of range for K = {k}")]
    ClusterOutOfRange { cluster: usize, k: usize },

    #[error("inertia curve does not decrease from K={k_min} ({first}) to K={k_max} ({last})")]
    InertiaAnomaly {
        k_min: usize,
        k_max: usize,
        first: f64,
        last: f64,
    },

    #[error("scenario {name:?} matches no test samples and cannot be evaluated")]
    UnevaluableScenario { name: String },

    #[error("{0}")]
    Json(#[from] serde_json::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the error comes from bad input rather than a bug.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Internal(_))
    }
}

fn preview(ids: &[String]) -> String {
    const SHOWN: usize = 10;
    let mut s = ids
        .iter()
        .take(SHOWN)
        .map(|id| format!("{id:?}"))
        .collect::<Vec<_>>()
        .join(", ");
    if ids.len() > SHOWN {
        s.push_str(", ...");
    }
    s
}
