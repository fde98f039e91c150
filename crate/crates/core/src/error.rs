use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is not a power of two >= 2")]
    NotPowerOfTwo(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("spectral multiplier is not even-symmetric (max deviation {deviation:e})")]
    AsymmetricMultiplier { deviation: f64 },

    #[error("inverse transform left an imaginary residue of {relative:e} (relative)")]
    ImaginaryResidue { relative: f64 },

    #[error("bad magic bytes, not a PATB file")]
    BadMagic,

    #[error("unsupported PATB version {0}")]
    UnsupportedVersion(u32),

    #[error("PATB payload kind {found} where {expected} was expected")]
    WrongKind { expected: u8, found: u8 },

    #[error("truncated PATB payload: {0}")]
    Truncated(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("sensor {index:?} is not on the outer pixel ring of a {n}x{n} grid")]
    SensorOffRing { index: (usize, usize), n: usize },

    #[error("duplicate sensor position {0:?}")]
    DuplicateSensor((usize, usize)),

    #[error("memory budget exceeded: {what} needs {requested} bytes, budget is {budget} bytes")]
    BudgetExceeded {
        what: &'static str,
        requested: u128,
        budget: u128,
    },

    #[error(
        "wavelet regularity r = {regularity} must exceed the smoothness index s = {s} (s < r)"
    )]
    RegularityTooLow { s: f64, regularity: f64 },

    #[error(
        "Matern wavelet backend needs sqrt(2 nu)/rho = 2^(-m') for an integer m' >= 0, got {ratio}"
    )]
    NotDyadic { ratio: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("requested time {requested} lies outside the source range [0, {end}]")]
    Extrapolation { requested: f64, end: f64 },

    #[error("GMRES: operator produced a non-finite value at iteration {iteration}")]
    SolverNonFinite { iteration: usize },

    #[error("{0}")]
    Csv(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn mismatch(expected: impl Into<String>, found: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            expected: expected.into(),
            found: found.into(),
        }
    }
}
