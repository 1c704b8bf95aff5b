use thiserror::Error;

/// CLI failures, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or input files: exit code 1.
    #[error("{0}")]
    Input(String),
    /// A numerical routine failed or a relation was violated on valid
    /// input: exit code 2.
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 1,
            Self::Numeric(_) => 2,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Self::Input(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Self::Numeric(msg.into())
    }
}

impl From<qmeas_core::Error> for CliError {
    fn from(e: qmeas_core::Error) -> Self {
        use qmeas_core::Error as E;
        match e {
            E::NoConvergence { .. } | E::NotPsd(_) | E::NegativeRadicand { .. } => Self::Numeric(e.to_string()),
            _ => Self::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Input(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
