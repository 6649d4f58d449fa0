use thiserror::Error;

/// Errors produced by the embedding, estimation, and synthesis pipeline.
#[derive(Debug, Error)]
pub enum OdseError {
    #[error("label kinds differ: {left} vs {right}")]
    LabelKindMismatch { left: String, right: String },

    #[error("real-vector labels differ in length: {left} vs {right}")]
    LabelDimensionMismatch { left: usize, right: usize },

    #[error("invalid graph `{id}`: {reason}")]
    InvalidGraph { id: String, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty sample: {0}")]
    EmptySample(&'static str),

    #[error("sample dimension {dim} too small for the MST entropy estimator (need > 2*pi*e, i.e. >= 19)")]
    DimensionTooSmall { dim: usize },

    #[error("degenerate entropy normalizer (iota = {0})")]
    DegenerateNormalizer(f64),

    #[error("column index {index} out of range for {cols} columns")]
    ColumnOutOfRange { index: usize, cols: usize },

    #[error("embedding dimension mismatch: query has {query}, training vectors have {train}")]
    EmbeddingDimensionMismatch { query: usize, train: usize },

    #[error("parse error in {source_name} at line {line}: {reason}")]
    Parse {
        source_name: String,
        line: usize,
        reason: String,
    },

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("degenerate prototype set: {0}")]
    DegenerateRs(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl OdseError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        OdseError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, OdseError>;
