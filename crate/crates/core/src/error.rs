use thiserror::Error;

/// Errors raised while configuring or evaluating a pressure calculation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// An integral or series failed to reach its tolerance.
    #[error("{what} did not converge at {location}: error estimate {estimate:.3e} for value {value:.6e}")]
    NonConvergence {
        what: &'static str,
        location: String,
        estimate: f64,
        value: f64,
    },

    #[error("no zero crossing of the nonequilibrium term between d = {d_lo:.4e} m ({f_lo:.4e} Pa) and d = {d_hi:.4e} m ({f_hi:.4e} Pa)")]
    NoZeroCrossing {
        d_lo: f64,
        d_hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) => 2,
            Error::NonConvergence { .. } => 3,
            Error::NoZeroCrossing { .. } | Error::Io(_) | Error::Csv(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
