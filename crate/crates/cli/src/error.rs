use std::fmt;
use std::process::ExitCode;

use pat_core::Error;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or input files.
    Usage(String),
    /// A check ran and failed, or the run failed at runtime.
    Failure(String),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
            CliError::Core(e) => match e {
                Error::NotPowerOfTwo(_)
                | Error::InvalidParameter { .. }
                | Error::BadMagic
                | Error::UnsupportedVersion(_)
                | Error::WrongKind { .. }
                | Error::Truncated(_) => 2,
                Error::DimensionMismatch { .. }
                | Error::RegularityTooLow { .. }
                | Error::NotDyadic { .. }
                | Error::Unsupported(_)
                | Error::Extrapolation { .. }
                | Error::SensorOffRing { .. }
                | Error::DuplicateSensor(_)
                | Error::AsymmetricMultiplier { .. } => 3,
                Error::BudgetExceeded { .. } => 4,
                _ => 1,
            },
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failure(m) => write!(f, "{m}"),
            CliError::Core(e) => match e {
                Error::RegularityTooLow { .. }
                | Error::NotDyadic { .. }
                | Error::Unsupported(_) => {
                    write!(f, "constraint violated: {e}")
                }
                Error::BudgetExceeded { .. } => write!(f, "refused: {e}"),
                _ => write!(f, "{e}"),
            },
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}
