use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid stratum: {0}")]
    InvalidStratum(String),
    #[error("label {label} is not in the catalog of {stratum}")]
    UnknownLabel { label: String, stratum: String },
    #[error("invalid move at {stratum}: {msg}")]
    InvalidMove { stratum: String, msg: String },
    #[error("incompatible: {0}")]
    Incompatible(String),
    #[error("character oracle did not converge: {0}")]
    Oracle(String),
    #[error("sphere datum required for {label} on {stratum}")]
    SphereDatumRequired { stratum: String, label: String },
    #[error("recursion depth exceeded while projecting {0}")]
    DepthExceeded(String),
    #[error("missing base weight for {0}")]
    MissingWeight(String),
    #[error("spectral flow: {0}")]
    SpectralFlow(String),
    #[error("not G-Morse: {0}")]
    NotMorse(String),
    #[error("function is not invariant: {0}")]
    NotInvariant(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("dataset: {0}")]
    Dataset(String),
    #[error("mismatched move: {0}")]
    MismatchedMove(String),
    #[error("schema error in field `{field}`: {msg}")]
    Schema { field: String, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Usage errors exit with 2, everything else with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            _ => 1,
        }
    }
}
