use thiserror::Error;

use crate::coupler::Polarization;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("spectral grid: {0}")]
    Grid(String),

    #[error("coupler has no coupling-strength model for polarization {0}")]
    MissingPolarization(Polarization),

    #[error("wavelength {lambda_nm:.4} nm outside tabulated range [{min_nm:.4}, {max_nm:.4}] nm")]
    OutOfTable {
        lambda_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },

    #[error("undersampled delay scan: step {step_fs:.5} fs exceeds the fringe bound {bound_fs:.5} fs (use envelope-only sampling)")]
    Aliasing { step_fs: f64, bound_fs: f64 },

    #[error("unreachable Schmidt number {requested:.4}; largest achievable on this grid is {achievable:.4}")]
    UnreachableSchmidt { requested: f64, achievable: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// True for errors caused by the inputs rather than by the computation.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Numerical(_) | Error::Io(_))
    }
}
