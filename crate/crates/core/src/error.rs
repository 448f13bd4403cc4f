use std::path::PathBuf;

/// Errors produced by the approximation library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrices must have at least one row and one column (got {rows}x{cols})")]
    Empty { rows: usize, cols: usize },

    #[error("buffer of length {len} does not match a {rows}x{cols} matrix")]
    BadLength {
        rows: usize,
        cols: usize,
        len: usize,
    },

    #[error("dimension mismatch in {op}: {left} vs {right}")]
    DimensionMismatch {
        op: &'static str,
        left: String,
        right: String,
    },

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("{what} = {value} out of range (expected {expected})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        expected: String,
    },

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("matrix is rank deficient: numerical rank {rank} < {required}")]
    RankDeficient { rank: usize, required: usize },

    #[error("matrix is numerically singular")]
    Singular,

    #[error("zero pivot at elimination step {step} (|pivot| = {pivot:e})")]
    ZeroPivot { step: usize, pivot: f64 },

    #[error("singular pivot block at panel {panel} (sigma_min = {sigma_min:e})")]
    SingularBlock { panel: usize, sigma_min: f64 },

    #[error("operation not supported for {0}")]
    Unsupported(&'static str),

    #[error("SVD failed to converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn dims(op: &'static str, left: (usize, usize), right: (usize, usize)) -> Self {
        Error::DimensionMismatch {
            op,
            left: format!("{}x{}", left.0, left.1),
            right: format!("{}x{}", right.0, right.1),
        }
    }
}
