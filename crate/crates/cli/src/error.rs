use std::path::PathBuf;

/// Failures of a CLI invocation, each with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Input(fastcur::Error),

    #[error("numerical failure: {0}")]
    Numerical(fastcur::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

/// Library errors caused by the user's input (bad files, bad parameters)
/// are usage errors; the rest are numerical.
impl From<fastcur::Error> for CliError {
    fn from(e: fastcur::Error) -> Self {
        use fastcur::Error as E;
        match e {
            E::Config(_)
            | E::Parse { .. }
            | E::Io { .. }
            | E::OutOfRange { .. }
            | E::Empty { .. } => CliError::Input(e),
            _ => CliError::Numerical(e),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
