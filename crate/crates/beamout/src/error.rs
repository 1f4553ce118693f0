use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] crate::config::ConfigError),

    #[error("numerical failure: {0}")]
    Numerical(beamout_core::Error),

    #[error("invalid scenario: {0}")]
    Model(beamout_core::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl From<beamout_core::Error> for CliError {
    fn from(e: beamout_core::Error) -> Self {
        match e {
            beamout_core::Error::ToleranceNotMet { .. } => CliError::Numerical(e),
            other => CliError::Model(other),
        }
    }
}

impl CliError {
    /// 2 for anything the user can fix in the config, 3 when the
    /// quadrature could not reach its tolerance.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Model(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}
