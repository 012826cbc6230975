use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Bloch vector: norm {0} exceeds 1")]
    InvalidBloch(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("degenerate rotation: zero quaternion")]
    DegenerateRotation,
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid effect: {0}")]
    InvalidEffect(String),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("invalid unitary: {0}")]
    InvalidUnitary(String),
    #[error("effect {index} has trace {trace:e}; ratio N/tr undefined")]
    DegenerateEffect { index: usize, trace: f64 },
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("size guard: {0}")]
    SizeGuard(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("non-finite objective {value} at quaternion {quaternion:?}")]
    NonFinite { value: f64, quaternion: [f64; 4] },
    #[error("non-monotone free predicate: {0}")]
    NonMonotone(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
