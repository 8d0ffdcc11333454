use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("orientation and arc length are undefined at the origin")]
    UndefinedAtOrigin,
    #[error("neighborhood pool is empty")]
    EmptyPool,
    #[error("archive is empty")]
    EmptyArchive,
    #[error("no archive member lies inside the region of interest")]
    NoneInRoi,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid genotype: {0}")]
    InvalidGenotype(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("schema violation in {file}: {reason}")]
    Schema { file: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
