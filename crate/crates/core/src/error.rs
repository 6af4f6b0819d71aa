use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series is degenerate: {0}")]
    DegenerateSeries(String),
    #[error("series too short: {0}")]
    TooShort(String),
    #[error("bad length {length} for series of length {n}")]
    BadLength { length: usize, n: usize },
    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("estimator failed to produce an estimate: {0}")]
    FailedEstimate(String),
    #[error("Toeplitz system is numerically singular (condition number {0:e})")]
    SingularSystem(f64),
    #[error("AR coefficients are not stationary")]
    Unstable,
    #[error("fitted AR process is too close to a unit root (|1 - sum(pi)| = {0:e})")]
    NearUnitRoot(f64),
    #[error("{rejected} of {draws} Monte Carlo draws were non-stationary")]
    TooManyRejections { rejected: usize, draws: usize },
    #[error("non-stationary generator parameters: {0}")]
    NonStationaryParam(String),
    #[error("exponential transform overflowed at index {0}")]
    Overflow(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable code used in sweep output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DegenerateSeries(_) => "degenerate",
            Error::TooShort(_) => "too_short",
            Error::BadLength { .. } => "bad_length",
            Error::NonFinite { .. } => "non_finite",
            Error::FailedEstimate(_) => "failed_estimate",
            Error::SingularSystem(_) => "singular_system",
            Error::Unstable => "unstable",
            Error::NearUnitRoot(_) => "near_unit_root",
            Error::TooManyRejections { .. } => "too_many_rejections",
            Error::NonStationaryParam(_) => "non_stationary_param",
            Error::Overflow(_) => "overflow",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Config(_) => "config",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
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

pub type Result<T> = std::result::Result<T, Error>;
