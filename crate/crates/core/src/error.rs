use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing face {face:?} of simplex {simplex:?}")]
    MissingFace { face: Vec<u32>, simplex: Vec<u32> },
    #[error("filtration monotonicity violation: face {face:?} enters after {simplex:?}")]
    Monotonicity { face: Vec<u32>, simplex: Vec<u32> },
    #[error("duplicate simplex {0:?}")]
    Duplicate(Vec<u32>),
    #[error("finite filtered data violated: {0}")]
    FfData(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(u32, u32),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("arity {0} out of range")]
    Arity(usize),
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
