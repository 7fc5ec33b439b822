use qslcorr::QslError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] QslError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{failed} of {total} self-test checks failed")]
    SelftestFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "ParseError",
            CliError::Validation(_) => "ValidationError",
            CliError::Core(e) => e.code(),
            CliError::Io { .. } => "IoError",
            CliError::SelftestFailed { .. } => "SelftestFailed",
        }
    }

    /// `error[Code]: message` on one line.
    pub fn render(&self) -> String {
        let msg = self.to_string().replace('\n', " ");
        format!("error[{}]: {msg}", self.code())
    }
}
