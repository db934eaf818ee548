use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator contains non-finite entries")]
    NonFinite,

    #[error("operator is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator dimension must be positive")]
    EmptyOperator,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator is not Hermitian: ||A - A*|| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("shift is singular: smallest singular value {sigma_min:e} of (zI + A)")]
    SingularShift { sigma_min: f64 },

    #[error("eigen-decomposition did not converge")]
    NoConvergence,

    #[error("sector semi-angle {alpha} outside [0, pi/2)")]
    InvalidSector { alpha: f64 },

    #[error("distance to a sector is undefined at the vertex z = 0")]
    ZeroPoint,

    #[error("step size must be non-negative, got {0}")]
    NegativeTau(f64),

    #[error("step size must be positive, got {0}")]
    NonPositiveTau(f64),

    #[error("declared regularity does not hold: {0}")]
    RegularityMismatch(String),

    #[error("invalid Kato function `{id}`: {clause}")]
    InvalidKato { id: String, clause: String },

    #[error("unknown Kato function id `{0}`")]
    UnknownKato(String),

    #[error("bad interval [{lo}, {hi}] with {grid} grid points")]
    BadInterval { lo: f64, hi: f64, grid: usize },

    #[error("bad parameter grid: {0}")]
    BadGrid(String),

    #[error("need at least {needed} samples above the numerical floor, found {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("every error sample is at or below the numerical floor")]
    AllBelowFloor,

    #[error("spectrum leaves [0, 1]: eigenvalue {eigenvalue}")]
    SpectrumOutOfRange { eigenvalue: f64 },

    #[error("operator is not a contraction: norm {norm}")]
    NotContraction { norm: f64 },

    #[error("vector must be non-zero")]
    ZeroVector,

    #[error("shift {re}+{im}i lies outside the admissible sector")]
    ZetaOutOfSector { re: f64, im: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
