use thiserror::Error;

/// Errors raised anywhere in the simulation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QslError {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NonHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("bad dimension: {0}")]
    BadDim(String),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("mixing parameter {0} outside [0, 1]")]
    BadMixingParameter(f64),
    #[error("state is not Bell-diagonal (max deviation {deviation:.3e})")]
    NotBellDiagonal { deviation: f64 },
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("invalid channel parameters: {0}")]
    BadParams(String),
    #[error("invalid geometry: {0}")]
    BadGeometry(String),
    #[error("invalid step count {0}: need an even number >= 10")]
    BadSteps(usize),
    #[error("integration diverged at t = {time}: min eigenvalue {min_eigenvalue:.3e}")]
    IntegrationDiverged { time: f64, min_eigenvalue: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("unsupported scenario: {0}")]
    UnsupportedScenario(String),
    #[error("generator produces no dynamics; speed limit undefined")]
    NoDynamics,
}

impl QslError {
    /// Stable machine-readable identifier for the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            QslError::NonHermitian { .. } => "NonHermitian",
            QslError::NotPsd { .. } => "NotPSD",
            QslError::BadDim(_) => "BadDim",
            QslError::InvalidState(_) => "InvalidState",
            QslError::BadMixingParameter(_) => "BadMixingParameter",
            QslError::NotBellDiagonal { .. } => "NotBellDiagonal",
            QslError::Domain(_) => "DomainError",
            QslError::BadParams(_) => "BadParams",
            QslError::BadGeometry(_) => "BadGeometry",
            QslError::BadSteps(_) => "BadSteps",
            QslError::IntegrationDiverged { .. } => "IntegrationDiverged",
            QslError::GridMismatch(_) => "GridMismatch",
            QslError::UnsupportedScenario(_) => "UnsupportedScenario",
            QslError::NoDynamics => "NoDynamics",
        }
    }
}

pub type Result<T> = std::result::Result<T, QslError>;
