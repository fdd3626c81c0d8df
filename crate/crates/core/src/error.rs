use thiserror::Error;

/// Which operator family a diagnostic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Dequantizers,
    Quantizers,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Dequantizers => write!(f, "dequantizer"),
            Family::Quantizers => write!(f, "quantizer"),
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NonHermitian { residual: f64 },

    #[error("matrix is singular within tolerance (rank {rank} < {size})")]
    Singular { rank: usize, size: usize },

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("index ({i}, {j}) out of range for dimension {d}")]
    IndexOutOfRange { i: usize, j: usize, d: usize },

    #[error("vector length {0} is not a perfect square")]
    NotSquareLength(usize),

    #[error("expected {expected} operators, got {got}")]
    WrongCount { expected: usize, got: usize },

    #[error("symbol length {got} does not match scheme size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("operator basis is not orthonormal (residual {residual:e})")]
    NotOrthonormal { residual: f64 },

    #[error("scheme is not tomographic (rank {rank} < {required})")]
    NotTomographic { rank: usize, required: usize },

    #[error("scheme is not overfilled; a minimal scheme has no quantizer gauge freedom")]
    NotOverfilled,

    #[error("gauge matrix violates U G^dagger = 0 (residual {residual:e})")]
    InvalidGauge { residual: f64 },

    #[error("scheme carries no quantizers")]
    MissingQuantizers,

    #[error("{family} {index} is not Hermitian (residual {residual:e})")]
    NonHermitianMember {
        family: Family,
        index: usize,
        residual: f64,
    },

    #[error("fiducial does not generate a SIC (Gram residual {residual:e})")]
    NotSic { residual: f64 },

    #[error("{0} is not prime")]
    NotPrime(usize),

    #[error("random POVM sampler failed after {0} attempts")]
    SamplerFailure(usize),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
