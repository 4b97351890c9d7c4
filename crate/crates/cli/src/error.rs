use thiserror::Error;

/// Failures mapped onto the process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, configuration or parameters.
    #[error("{0}")]
    Usage(String),
    /// Numerical or I/O failure outside the caller's control.
    #[error("{0}")]
    Infra(String),
    /// An exact identity did not hold (`verify` only).
    #[error("{0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Infra(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl From<phaselaw::Error> for CliError {
    fn from(e: phaselaw::Error) -> Self {
        use phaselaw::Error as E;
        match e {
            E::InvalidParameter(_)
            | E::SignedDensity(_)
            | E::ReplicaOverflow { .. }
            | E::CounterOverflow { .. }
            | E::SpectralParameter { .. }
            | E::Dimension(_)
            | E::BudgetExceeded { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Infra(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Infra(e.to_string())
    }
}
