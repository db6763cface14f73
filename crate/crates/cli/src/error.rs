use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("numerical failure: {0}")]
    Numerical(ess_core::EssError),
    #[error("invalid problem: {0}")]
    Invalid(ess_core::EssError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 1,
            _ => 2,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl From<ess_core::EssError> for CliError {
    fn from(e: ess_core::EssError) -> Self {
        match e {
            ess_core::EssError::Singular { .. } => CliError::Numerical(e),
            other => CliError::Invalid(other),
        }
    }
}
