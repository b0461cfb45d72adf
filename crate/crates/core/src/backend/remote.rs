//! Blocking HTTP client for the model service (`/generate`, `/score`, `/health`
//! and their `_batch` variants).

use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::Serialize;
use ureq::Agent;

use super::wire::{
    Batch, GenerationRequest, GenerationResponse, HealthResponse, ScoreRequest, ScoreResponse,
};
use super::{BackendError, GeneratorBackend, RetryPolicy};
use crate::corpus::Discourse;
use crate::scoring::ScorerBackend;

/// Maximum number of items the service accepts in one batch request.
pub const BATCH_LIMIT: usize = 64;

#[derive(Debug, Clone)]
pub struct RemoteClient {
    base_url: String,
    agent: Agent,
    retry: RetryPolicy,
}

impl RemoteClient {
    pub fn new(base_url: impl Into<String>, timeout: Duration, retry: RetryPolicy) -> Self {
        let agent: Agent = Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            base_url: base_url.into().trim_end_matches('/').to_owned(),
            agent,
            retry,
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    pub fn retry_policy(&self) -> RetryPolicy {
        self.retry
    }

    fn url(&self, path: &str) -> String {
        format!("{}{}", self.base_url, path)
    }

    fn post<B: Serialize, T: DeserializeOwned>(&self, path: &str, body: &B) -> Result<T, BackendError> {
        let resp = self
            .agent
            .post(&self.url(path))
            .send_json(body)
            .map_err(map_transport)?;
        decode(resp)
    }

    pub fn health(&self) -> Result<HealthResponse, BackendError> {
        let resp = self
            .agent
            .get(&self.url("/health"))
            .call()
            .map_err(map_transport)?;
        decode(resp)
    }

    /// One `/score` call, no retries.
    pub fn score_sentences(&self, sentences: &[String]) -> Result<ScoreResponse, BackendError> {
        let resp: ScoreResponse = self.post(
            "/score",
            &ScoreRequest {
                sentences: sentences.to_vec(),
            },
        )?;
        check_coherence(resp.coherence)?;
        Ok(resp)
    }

    /// Scores many discourses through `/score_batch`, at most [`BATCH_LIMIT`] per request.
    pub fn score_batch(&self, items: &[Vec<String>]) -> Result<Vec<ScoreResponse>, BackendError> {
        let mut out = Vec::with_capacity(items.len());
        for chunk in items.chunks(BATCH_LIMIT) {
            let body = Batch {
                items: chunk
                    .iter()
                    .map(|s| ScoreRequest { sentences: s.clone() })
                    .collect(),
            };
            let resp: Batch<ScoreResponse> =
                self.retry.run(|_| self.post("/score_batch", &body))?;
            if resp.items.len() != chunk.len() {
                return Err(BackendError::Protocol(format!(
                    "score_batch returned {} items for {} requests",
                    resp.items.len(),
                    chunk.len()
                )));
            }
            for r in &resp.items {
                check_coherence(r.coherence)?;
            }
            out.extend(resp.items);
        }
        Ok(out)
    }

    /// Generates for many requests through `/generate_batch`, at most [`BATCH_LIMIT`]
    /// per request.
    pub fn generate_batch(
        &self,
        requests: &[GenerationRequest],
    ) -> Result<Vec<GenerationResponse>, BackendError> {
        let mut out = Vec::with_capacity(requests.len());
        for chunk in requests.chunks(BATCH_LIMIT) {
            let body = Batch {
                items: chunk.to_vec(),
            };
            let resp: Batch<GenerationResponse> =
                self.retry.run(|_| self.post("/generate_batch", &body))?;
            if resp.items.len() != chunk.len() {
                return Err(BackendError::Protocol(format!(
                    "generate_batch returned {} items for {} requests",
                    resp.items.len(),
                    chunk.len()
                )));
            }
            out.extend(resp.items);
        }
        Ok(out)
    }
}

fn check_coherence(v: f64) -> Result<(), BackendError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(BackendError::OutOfRange(v))
    }
}

fn map_transport(e: ureq::Error) -> BackendError {
    match e {
        ureq::Error::Timeout(_) => BackendError::Timeout,
        ureq::Error::StatusCode(status) => BackendError::Http {
            status,
            body: String::new(),
        },
        ureq::Error::Json(e) => BackendError::Protocol(e.to_string()),
        other => BackendError::Unreachable(other.to_string()),
    }
}

fn decode<T: DeserializeOwned>(
    mut resp: ureq::http::Response<ureq::Body>,
) -> Result<T, BackendError> {
    let status = resp.status().as_u16();
    if !(200..300).contains(&status) {
        let body = resp.body_mut().read_to_string().unwrap_or_default();
        return Err(BackendError::Http { status, body });
    }
    let text = resp.body_mut().read_to_string().map_err(map_transport)?;
    serde_json::from_str(&text).map_err(|e| BackendError::Protocol(e.to_string()))
}

impl ScorerBackend for RemoteClient {
    fn score(&self, discourse: &Discourse) -> Result<f64, BackendError> {
        self.retry
            .run(|_| self.score_sentences(discourse.sentences()))
            .map(|r| r.coherence)
    }

    fn identity(&self) -> String {
        format!("remote:{}", self.base_url)
    }
}

impl GeneratorBackend for RemoteClient {
    /// Single attempt; callers apply their own retry policy.
    fn generate(&self, request: &GenerationRequest) -> Result<GenerationResponse, BackendError> {
        self.post("/generate", request)
    }

    fn identity(&self) -> String {
        format!("remote:{}", self.base_url)
    }
}
