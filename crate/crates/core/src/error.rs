use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("sample set is empty")]
    EmptySampleSet,

    #[error("non-finite value at coordinate {index}")]
    NonFinite { index: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("expected a unit vector, found norm {norm}")]
    NotUnitVector { norm: f64 },

    #[error("projection basis is not orthonormal (rows {i} and {j}: inner product {value})")]
    NotOrthonormal { i: usize, j: usize, value: f64 },

    #[error("mechanism direction is not in the visible subspace (residual {residual})")]
    NotVisible { residual: f64 },

    #[error("invisible quality direction: |P w_f| = {norm} is below {tolerance}")]
    InvisibleQuality { norm: f64, tolerance: f64 },

    #[error("directions too aligned: w1.w2 = {omega} exceeds 1 - 2*eps = {limit}")]
    DirectionsTooAligned { omega: f64, limit: f64 },

    #[error("directions are antipodal (w1.w2 = {omega}); the construction is undefined")]
    AntipodalDirections { omega: f64 },

    #[error("empty direction family: eta = {eta} exceeds |P w_f| = {max}")]
    EmptyFamily { eta: f64, max: f64 },

    #[error("grid too fine: {required} correlation values required, cap is {cap}")]
    GridTooFine { required: u64, cap: u64 },

    #[error("projection rank {rank} exceeds the supported maximum {max}")]
    RankTooHigh { rank: usize, max: usize },

    #[error("operation requires the identity quality transform")]
    UnsupportedTransform,

    #[error("linear mechanism induces unbounded improvement (|w_g| = {norm} >= c = {cost})")]
    Unbounded { norm: f64, cost: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
