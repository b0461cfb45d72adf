//! Backend plumbing shared by generators and scorers.

mod remote;
mod wire;

use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use remote::{RemoteClient, BATCH_LIMIT};
pub use wire::{
    Batch, GenerationRequest, GenerationResponse, HealthResponse, MaskSide, ScoreRequest,
    ScoreResponse,
};

/// Environment variable consulted for the model-service base URL when none is given.
pub const BACKEND_URL_ENV: &str = "COHERENCE_BACKEND_URL";

#[derive(Debug, Clone, Error, PartialEq)]
pub enum BackendError {
    #[error("backend unreachable: {0}")]
    Unreachable(String),
    #[error("backend timed out")]
    Timeout,
    #[error("backend returned HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("malformed backend response: {0}")]
    Protocol(String),
    #[error("backend score {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("discourse not present in label table: {0}")]
    UnknownDiscourse(String),
    #[error("{0}")]
    Unsupported(String),
}

impl BackendError {
    /// Transport failures and server-side errors are worth another attempt; contract
    /// and request errors are not.
    pub fn is_retryable(&self) -> bool {
        match self {
            Self::Unreachable(_) | Self::Timeout => true,
            Self::Http { status, .. } => *status >= 500 || *status == 429,
            _ => false,
        }
    }
}

/// Bounded retries with exponential backoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetryPolicy {
    /// Attempts after the first one.
    pub max_retries: u32,
    pub initial_backoff_ms: u64,
    pub multiplier: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_retries: 2,
            initial_backoff_ms: 100,
            multiplier: 2.0,
        }
    }
}

impl RetryPolicy {
    pub fn none() -> Self {
        Self {
            max_retries: 0,
            initial_backoff_ms: 0,
            multiplier: 1.0,
        }
    }

    /// Runs `op` until it succeeds, fails with a non-retryable error, or the retry
    /// budget is spent. `op` receives the 0-based attempt number.
    pub fn run<T>(
        &self,
        mut op: impl FnMut(u32) -> Result<T, BackendError>,
    ) -> Result<T, BackendError> {
        let mut backoff = self.initial_backoff_ms as f64;
        let mut attempt = 0;
        loop {
            match op(attempt) {
                Ok(v) => return Ok(v),
                Err(e) if e.is_retryable() && attempt < self.max_retries => {
                    tracing::debug!(attempt, error = %e, "retrying backend call");
                    if backoff > 0.0 {
                        thread::sleep(Duration::from_millis(backoff as u64));
                    }
                    backoff *= self.multiplier;
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
}

/// A sentence generator that fills a masked position from truncated context.
pub trait GeneratorBackend: Send + Sync {
    fn generate(&self, request: &GenerationRequest) -> Result<GenerationResponse, BackendError>;

    fn identity(&self) -> String;

    /// Serial-only backends return false and are driven from a single worker.
    fn supports_concurrency(&self) -> bool {
        true
    }
}

/// Test double that always answers with the same sentence.
#[derive(Debug, Clone)]
pub struct EchoGenerator {
    sentence: String,
}

impl EchoGenerator {
    pub const DEFAULT_SENTENCE: &'static str =
        "Officials declined to comment on the matter on Tuesday.";

    pub fn new(sentence: impl Into<String>) -> Self {
        Self {
            sentence: sentence.into(),
        }
    }
}

impl Default for EchoGenerator {
    fn default() -> Self {
        Self::new(Self::DEFAULT_SENTENCE)
    }
}

impl GeneratorBackend for EchoGenerator {
    fn generate(&self, _request: &GenerationRequest) -> Result<GenerationResponse, BackendError> {
        Ok(GenerationResponse {
            substitute: self.sentence.clone(),
            model_id: self.identity(),
        })
    }

    fn identity(&self) -> String {
        "echo".into()
    }
}
