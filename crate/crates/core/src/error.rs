use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("row count mismatch: {first} has {expected} rows but {other} has {found}")]
    RowCountMismatch {
        first: String,
        expected: usize,
        other: String,
        found: usize,
    },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("class {0} has no samples")]
    EmptyClass(usize),

    #[error("labels are required for {0}")]
    MissingLabels(String),

    #[error("cannot split class {class} ({size} samples) into non-empty train/test sides")]
    UnsplittableClass { class: i64, size: usize },

    #[error("view {view} has zero variance")]
    ZeroVariance { view: usize },

    #[error("view {view}: Gram matrix is singular after jitter")]
    SingularView { view: usize },

    #[error("constraint not positive definite; increase Tikhonov γ")]
    NotPositiveDefinite,

    #[error("matrix `{0}` is not symmetric")]
    NotSymmetric(&'static str),

    #[error("subspace dimension k = {k} must satisfy 1 <= k <= {bound}")]
    InvalidDimension { k: usize, bound: usize },

    #[error("eigenvalue crossing at k; reduce k or add jitter (gap {gap:e} at k = {k})")]
    EigenvalueCrossing { k: usize, gap: f64 },

    #[error("no built-in classifier for this target kind")]
    NoClassifier,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Failures of the numerical kernels, as opposed to bad input or configuration.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite
                | Error::SingularView { .. }
                | Error::EigenvalueCrossing { .. }
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
