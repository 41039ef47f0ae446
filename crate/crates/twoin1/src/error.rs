use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("writing {path}: {message}")]
    Output { path: PathBuf, message: String },
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Core(#[from] twoin1_core::Error),
}

impl CliError {
    /// 0 success, 2 config, 3 numerical, 4 saturation.
    pub fn exit_code(&self) -> i32 {
        use twoin1_core::Error as E;
        match self {
            CliError::Config { .. } | CliError::Invalid(_) => 2,
            CliError::Core(E::InvalidDesign(_) | E::InvalidScenario(_)) => 2,
            CliError::Core(E::Saturation { .. }) => 4,
            _ => 3,
        }
    }
}
