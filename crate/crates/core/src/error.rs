use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    MalformedRow { line: u64, message: String },

    #[error("line {line}: expected {expected} feature values, found {found}")]
    RowLength {
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: unknown label `{token}` (expected `dys` or `nodys`)")]
    UnknownLabel { line: u64, token: String },

    #[error("header does not match the {variant} layout: {message}")]
    Header { variant: String, message: String },

    #[error("invalid record: {0}")]
    InvalidRecord(String),

    #[error("invalid manifest: {0}")]
    InvalidManifest(String),

    #[error("malformed session: {0}")]
    MalformedSession(String),

    #[error("incomplete session, missing questions {missing:?}")]
    IncompleteSession { missing: Vec<u8> },

    #[error("training data must contain both classes")]
    SingleClass,

    #[error("record is unlabeled; training and evaluation need labeled data")]
    Unlabeled,

    #[error("feature vector has length {found}, expected {expected}")]
    VectorLength { expected: usize, found: usize },

    #[error("unsupported model artifact version {found} (this build reads version {expected})")]
    ArtifactVersion { found: u64, expected: u64 },

    #[error("malformed model artifact: {0}")]
    MalformedArtifact(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no fold partition kept both classes in every training split after {0} attempts")]
    PartitionRetries(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the caller's data rather than by the library.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}
