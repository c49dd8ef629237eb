use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sequence exhausted: no marked positions left")]
    SequenceExhausted,
    #[error("malformed Ehrlich state: {0}")]
    MalformedState(String),
    #[error("invalid bitstring {0:?}")]
    InvalidBitString(String),
    #[error("bitstring length {found} does not match n = {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("data vector has zero norm")]
    ZeroVector,
    #[error("data vector contains a non-finite entry at index {0}")]
    NonFinite(usize),
    #[error("invalid dimension d = {d}: {reason}")]
    Dimension { d: usize, reason: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("gate {index}: {reason}")]
    InvalidGate { index: usize, reason: String },
    #[error("gate {index}: unknown gate kind {kind:?}")]
    UnknownGateKind { index: usize, kind: String },
    #[error("gate {index}: schema error: {message}")]
    Schema { index: usize, message: String },
    #[error("expected a {expected}-level circuit, got {found}")]
    LevelMismatch { expected: String, found: String },
    #[error("n = {n} exceeds the limit of {max} qubits for this operation")]
    TooManyQubits { n: usize, max: usize },
    #[error("sparse ordering violation at pairs {first} and {second}: {detail}")]
    SparseOrdering { first: usize, second: usize, detail: String },
    #[error("duplicate address {0}")]
    DuplicateAddress(String),
    #[error("verification failed after gate {gate}: {detail}")]
    Verification { gate: usize, detail: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable snake_case name of the variant, for machine-readable reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::SequenceExhausted => "sequence_exhausted",
            Error::MalformedState(_) => "malformed_state",
            Error::InvalidBitString(_) => "invalid_bitstring",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::ZeroVector => "zero_vector",
            Error::NonFinite(_) => "non_finite",
            Error::Dimension { .. } => "dimension",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::InvalidGate { .. } => "invalid_gate",
            Error::UnknownGateKind { .. } => "unknown_gate_kind",
            Error::Schema { .. } => "schema",
            Error::LevelMismatch { .. } => "level_mismatch",
            Error::TooManyQubits { .. } => "too_many_qubits",
            Error::SparseOrdering { .. } => "sparse_ordering",
            Error::DuplicateAddress(_) => "duplicate_address",
            Error::Verification { .. } => "verification",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
