use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid rational: {0:?}")]
    InvalidRational(String),
    #[error("zero linear form")]
    ZeroLinearForm,
    #[error("zero form")]
    ZeroForm,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("empty point set")]
    EmptyPointSet,
    #[error("duplicate point at index {0}")]
    DuplicatePoint(usize),
    #[error("point set is linearly independent")]
    LinearlyIndependent,
    #[error("dependent d-th powers")]
    DependentPowers,
    #[error("point set does not decompose the form")]
    NotADecomposition,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{family}: resample budget of {attempts} attempts exceeded")]
    ResampleExhausted { family: String, attempts: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
