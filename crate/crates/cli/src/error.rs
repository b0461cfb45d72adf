use coherence_core::augment::AugmentError;
use coherence_core::metaeval::MetaEvalError;
use coherence_core::{BackendError, CorpusError, ScoringError};
use thiserror::Error;

/// Failures that end a command. `Usage` maps to exit status 2, the rest to 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
    #[error("{failed} of {total} {what} failed")]
    Partial {
        failed: usize,
        total: usize,
        what: &'static str,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) | CliError::Partial { .. } => 1,
        }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Runtime(format!("cannot write {}: {e}", path.display()))
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<BackendError> for CliError {
    fn from(e: BackendError) -> Self {
        CliError::Runtime(format!("backend error: {e}"))
    }
}

impl From<ScoringError> for CliError {
    fn from(e: ScoringError) -> Self {
        match e {
            ScoringError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            ScoringError::Backend(b) => b.into(),
        }
    }
}

impl From<AugmentError> for CliError {
    fn from(e: AugmentError) -> Self {
        match e {
            AugmentError::Backend(b) => b.into(),
            AugmentError::Corpus(c) => c.into(),
            AugmentError::InvalidConfig(_)
            | AugmentError::InsufficientData { .. }
            | AugmentError::InvalidInput(_) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<MetaEvalError> for CliError {
    fn from(e: MetaEvalError) -> Self {
        match e {
            MetaEvalError::Scoring { .. } => CliError::Runtime(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}
