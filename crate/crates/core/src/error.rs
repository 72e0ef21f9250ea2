use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} must be a power of two and at least 16")]
    GridSize(usize),

    #[error("domain length {0} must be positive and finite")]
    DomainLength(f64),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field contains non-finite values")]
    NonFinite,

    #[error("data length {got} does not match grid ({expected} samples)")]
    Length { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid with n = {n} hosts only {blocks} dyadic blocks (need at least 3)")]
    TooFewBlocks { n: usize, blocks: usize },

    #[error("dyadic block {0} is identically zero")]
    ZeroBlock(i32),

    #[error("empty history")]
    EmptyHistory,

    #[error("history mismatch: {0}")]
    HistoryMismatch(String),

    #[error("CFL violation: dt = {dt} exceeds limit {limit}")]
    Cfl { dt: f64, limit: f64 },

    #[error("blowup detected at t = {t} (step {step}): {reason}")]
    Blowup { t: f64, step: u64, reason: String },

    #[error("energy law is only asserted for normalized parameters (a = 0, nu = mu1 = mu2 = b = 1)")]
    NotNormalized,

    #[error("config error: {0}")]
    Config(String),

    #[error("malformed samples file: {0}")]
    Samples(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
