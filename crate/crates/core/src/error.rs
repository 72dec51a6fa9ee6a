use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error("invalid embedding dimension {m}: {reason}")]
    InvalidDimension { m: usize, reason: &'static str },
    #[error("invalid delay {0}: must be at least 1")]
    InvalidDelay(usize),
    #[error("insufficient length: series of {len} samples cannot hold a window with m={m}, delay={delay}")]
    InsufficientLength { len: usize, m: usize, delay: usize },
    #[error("ties present in window starting at {start}")]
    TiesPresent { start: usize },
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    #[error("no complete cases: every window contains tied values")]
    NoCompleteCases,
    #[error("empty prior: no tie-free window to build the complete-case distribution")]
    EmptyPrior,
    #[error("strategy {0} needs a seed")]
    MissingSeed(&'static str),
    #[error("unknown strategy {0:?}")]
    UnknownStrategy(String),
    #[error("empty distribution")]
    EmptyDistribution,
    #[error("distributions are incompatible: {0}")]
    IncompatibleDistributions(&'static str),
    #[error("unknown map {0:?}")]
    UnknownMap(String),
    #[error("invalid map specification for {map}: {reason}")]
    InvalidMapSpec { map: String, reason: String },
    #[error("orbit of {map} diverged at iteration {iteration}")]
    OrbitDiverged { map: String, iteration: usize },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("parse error in {}: line {line}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, #[source] source: std::io::Error },
    #[error("no input files in {}", .0.display())]
    NoInputFiles(PathBuf),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Coarse classification used by front ends to choose exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad parameters or configuration values.
    Usage,
    /// Unreadable or malformed input files.
    Input,
    /// The estimator itself could not produce a result.
    Strategy,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidDimension { .. }
            | Error::InvalidDelay(_)
            | Error::MissingSeed(_)
            | Error::UnknownStrategy(_)
            | Error::UnknownMap(_)
            | Error::InvalidMapSpec { .. }
            | Error::InvalidSymbol(_)
            | Error::Config(_) => ErrorKind::Usage,
            Error::Parse { .. }
            | Error::Io { .. }
            | Error::NoInputFiles(_)
            | Error::InvalidSeries(_)
            | Error::Csv(_) => ErrorKind::Input,
            Error::InsufficientLength { .. }
            | Error::TiesPresent { .. }
            | Error::NoCompleteCases
            | Error::EmptyPrior
            | Error::EmptyDistribution
            | Error::IncompatibleDistributions(_)
            | Error::OrbitDiverged { .. }
            | Error::EmptyInput(_) => ErrorKind::Strategy,
        }
    }
}
