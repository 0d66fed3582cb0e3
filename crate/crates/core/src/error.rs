use thiserror::Error;

/// Errors raised by the walk library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows} rows, row {row} has {cols} entries")]
    NonSquare { rows: usize, row: usize, cols: usize },

    #[error("negative entry {value} at row {row}, column {col}")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("column {col} sums to zero (dangling node)")]
    ZeroColumn { col: usize },

    #[error("column {col} sums to {sum}, expected 1 within {tolerance:e}")]
    NotStochastic { col: usize, sum: f64, tolerance: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilityVector(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: expected {expected}x{expected}, found {found}x{found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("vector length {len} is not a perfect square")]
    NotPerfectSquare { len: usize },

    #[error("state has norm {norm:e}, too small to normalize")]
    ZeroNorm { norm: f64 },

    #[error("index {index} out of range for {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("non-finite phase angle at row {row}, column {col}")]
    NonFiniteAngle { row: usize, col: usize },

    #[error("pipeline has no operators")]
    EmptyPipeline,

    #[error("state is not normalized: norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("batch members have different sizes: {expected} and {found}")]
    HeterogeneousBatch { expected: usize, found: usize },

    #[error("batch is empty")]
    EmptyBatch,

    #[error("ensemble weights are invalid: {0}")]
    WeightsNotNormalized(String),

    #[error("ensemble members {first} and {second} are not orthonormal (overlap {overlap:e})")]
    NotOrthonormal {
        first: usize,
        second: usize,
        overlap: f64,
    },

    #[error("batch size must be at least 1")]
    BatchSizeZero,

    #[error("semiclassical column {col} sums to {sum}; the unitary is broken")]
    BrokenUnitary { col: usize, sum: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("power iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("dense operator for N = {n} exceeds the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("need at least 3 sizes for a scaling fit, got {0}")]
    InsufficientSizes(usize),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotNormalized { .. }
                | Error::BrokenUnitary { .. }
                | Error::NoConvergence { .. }
                | Error::ZeroNorm { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
