use thiserror::Error;

/// Errors raised by the density, quadrature and root-counting routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coefficient index {k} outside 0..={degree}")]
    IndexOutOfRange { k: usize, degree: usize },

    #[error("invalid ensemble: {0}")]
    InvalidSpec(String),

    #[error("operation requires an alpha or mu profile, got {0}")]
    UnsupportedProfile(String),

    #[error("phi has no interior minimum for alpha = {alpha} (needs alpha > 1)")]
    NoInteriorMinimum { alpha: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("negative radicand {radicand:e} (scale {scale:e}) at log x = {logx}")]
    NumericalInstability {
        logx: f64,
        radicand: f64,
        scale: f64,
    },

    #[error("quadrature did not converge: estimate {estimate} with error {error:e} after {panels} panels")]
    NoConvergence {
        estimate: f64,
        error: f64,
        panels: usize,
    },

    #[error("degree {degree} exceeds the exact oracle limit {limit}")]
    OracleLimit { degree: usize, limit: usize },

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
