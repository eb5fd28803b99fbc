use std::path::PathBuf;

/// Errors raised across the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("depth violation: min(1 + eta) = {min_depth} below the floor {floor}")]
    DepthViolation { min_depth: f64, floor: f64 },

    #[error("flattening failed: min dz rho = {min_dz_rho} < h0/2 after {halvings} halvings of delta")]
    FlatteningFailure { min_dz_rho: f64, halvings: usize },

    #[error("ellipticity violation: discriminant minimum {min} is not positive")]
    EllipticityViolation { min: f64 },

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("instability in parabolic march at level {level}: growth factor {growth}")]
    Instability { level: usize, growth: f64 },

    #[error("flattening map has no time derivative attached")]
    MissingTimeDerivative,

    #[error("Taylor sign violation: min a = {a_min} below c0 = {c0}")]
    TaylorSignViolation { a_min: f64, c0: f64 },

    #[error("point y = {y} lies outside the fluid column [-1, {top}]")]
    OutsideStrip { y: f64, top: f64 },

    #[error("config parse error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("invalid value for `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("unknown field `{name}`; valid fields: {valid}")]
    UnknownField { name: String, valid: String },

    #[error("snapshot error: {0}")]
    Snapshot(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
