use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index:?} out of bounds for shape {shape:?}")]
    OutOfBounds {
        index: (usize, usize),
        shape: (usize, usize),
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unknown vertex or qubit label {0}")]
    UnknownLabel(u32),

    #[error("duplicate label {0}")]
    DuplicateLabel(u32),

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("{what} needs {n} qubits/parties, limit is {limit}")]
    SizeLimit {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("measurement basis {0} is not supported at graph level")]
    UnsupportedBasis(String),

    #[error("outcome {outcome} of step {step} has probability {probability:.3e}")]
    ImpossibleOutcome {
        step: usize,
        outcome: u8,
        probability: f64,
    },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("operator is not a valid {0}")]
    InvalidOperator(&'static str),

    #[error("vertices {0} and {1} lie in different connected components")]
    NoPath(u32, u32),

    #[error("structure check failed: {0}")]
    StructureCheck(String),

    #[error("states are not orthogonal (overlap {0:.3e})")]
    NonOrthogonal(f64),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
