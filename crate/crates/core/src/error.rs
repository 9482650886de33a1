use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(&'static str),

    #[error("non-finite value in {field} at step {step} (t = {t})")]
    NonFinite { field: &'static str, step: u64, t: f64 },

    #[error("time step {dt} exceeds the CFL limit {limit}")]
    Cfl { dt: f64, limit: f64 },

    #[error("Picard iteration did not converge in {iterations} iterations (contraction ratios {ratios:?})")]
    PicardDiverged { iterations: usize, ratios: Vec<f64> },

    #[error("invalid initial data: {0}")]
    InitialData(String),

    #[error("{0}")]
    Lab(&'static str),

    /// Raised by a run observer, e.g. when output cannot be written.
    #[error("observer failed: {0}")]
    Observer(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
