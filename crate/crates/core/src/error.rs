use thiserror::Error;

/// Errors raised by the numerical kernels and experiment drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("representation mismatch: expected {expected}, found {found}")]
    Representation {
        expected: &'static str,
        found: &'static str,
    },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("chirp at t = {t} is not resolved by the grid (minimum resolved |t| is {t_min})")]
    UnresolvedChirp { t: f64, t_min: f64 },
    #[error("divergent weighted time integral: {0}")]
    DivergentWeight(String),
    #[error("inadmissible exponents: {0}")]
    Inadmissible(String),
    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),
    #[error("bracket failure: {0}")]
    Bracket(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("format: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
