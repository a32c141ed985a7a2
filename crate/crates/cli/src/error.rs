use std::path::PathBuf;

/// Failure of a CLI run; every variant maps to a stable exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Io { .. } | CliError::Unsupported(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub(crate) fn missing(path: &str, needed_by: &str) -> Self {
        CliError::Config { path: path.to_string(), message: format!("required by `{needed_by}`") }
    }
}

/// Core errors raised after validation are numeric failures.
impl From<qsteer_core::Error> for CliError {
    fn from(e: qsteer_core::Error) -> Self {
        match e {
            qsteer_core::Error::Unsupported(m) => CliError::Unsupported(m),
            other => CliError::Numeric(other.to_string()),
        }
    }
}
