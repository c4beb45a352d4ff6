use std::path::PathBuf;

use crate::metrics::MetricKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has zero dimension")]
    Empty,

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not symmetric: asymmetry {asymmetry:e} exceeds tolerance {tolerance:e}")]
    NotSymmetric { asymmetry: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(
        "matrix is not positive definite (min eigenvalue {min_eigenvalue:e}); \
         clamp the spectrum first with spdness::clamp_to_spd"
    )]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("symmetric eigensolver did not converge (dim {dim}, frobenius norm {frobenius:e})")]
    EigenNoConvergence { dim: usize, frobenius: f64 },

    #[error("spectral overflow: exponent magnitude {magnitude:e} exceeds double-precision range")]
    Overflow { magnitude: f64 },

    #[error("cholesky factorization failed at pivot {index} (value {value:e})")]
    CholeskyPivot { index: usize, value: f64 },

    #[error("{metric} geodesic failed: {source}")]
    Metric {
        metric: MetricKind,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("variable {row} is constant across time")]
    ConstantRow { row: usize },

    #[error("target length {target} does not evenly divide series length {len}")]
    NotADivisor { target: usize, len: usize },

    #[error("target length {target} exceeds series length {len}")]
    TooLong { target: usize, len: usize },

    #[error("gram matrix is singular even with jitter {jitter:e}; use a positive ridge")]
    SingularGram { jitter: f64 },

    #[error("samples {i} and {j} coincide (kernel value {kernel:e})")]
    CoincidentSamples { i: usize, j: usize, kernel: f64 },

    #[error("labels must be nonnegative, found {value}")]
    NegativeLabel { value: f64 },

    #[error("need at least {needed} distinct labels, found {found}")]
    InsufficientLabels { needed: usize, found: usize },

    #[error("incompatible input: {0}")]
    Incompatible(String),

    #[error("bad magic bytes {found:?}, expected \"SPDB\"")]
    BadMagic { found: [u8; 4] },

    #[error("unsupported format version {found}, expected {expected}")]
    VersionMismatch { found: u16, expected: u16 },

    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: u64, found: u64 },

    #[error("trailing bytes after payload: {extra}")]
    TrailingBytes { extra: u64 },

    #[error("label count mismatch: {matrices} matrices, {labels} labels")]
    LabelCountMismatch { matrices: usize, labels: usize },

    #[error("malformed csv {path}: {reason}")]
    Csv { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn with_metric(self, metric: MetricKind) -> Self {
        match self {
            e @ (Error::DimensionMismatch { .. } | Error::Metric { .. }) => e,
            e => Error::Metric {
                metric,
                source: Box::new(e),
            },
        }
    }
}
