use std::fmt;
use std::process::ExitCode;

use tseval_core::features::FeatureError;
use tseval_core::qats_io::QatsError;
use tseval_core::qemodel::QeModelError;
use tseval_core::resources::ResourceError;
use tseval_core::stats::StatsError;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or configuration.
    Usage(String),
    /// Inputs that fail to load or validate.
    Data(String),
    /// A state the program should never reach.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

macro_rules! data_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Data(e.to_string())
            }
        }
    )*};
}

data_errors!(FeatureError, QatsError, ResourceError, StatsError);

impl From<QeModelError> for CliError {
    fn from(e: QeModelError) -> Self {
        match e {
            QeModelError::TargetKind { .. } | QeModelError::LengthMismatch { .. } => {
                CliError::Internal(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

/// Wraps an I/O error with the path it concerns.
pub fn io(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}
