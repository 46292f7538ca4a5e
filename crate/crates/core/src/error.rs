use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot normalize a zero vector (norm {norm:e})")]
    ZeroVector { norm: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("mode index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("beamsplitter element couples mode {0} to itself")]
    DegenerateElement(usize),

    #[error("composed network deviates from unitarity by {deviation:e}")]
    NonUnitaryComposition { deviation: f64 },

    #[error("unknown path `{0}`")]
    UnknownPath(String),

    #[error(
        "tagged path `{name}` refers to stage {stage} but the network has {elements} elements"
    )]
    StageOutOfRange {
        name: String,
        stage: usize,
        elements: usize,
    },

    #[error("outcome basis is not orthonormal and complete (deviation {deviation:e})")]
    IncompleteBasis { deviation: f64 },

    #[error("{0}")]
    Domain(String),

    #[error("outcome labels differ between distributions: {0}")]
    LabelMismatch(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
