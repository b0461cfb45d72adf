//! JSON bodies of the model-service protocol.

use serde::{Deserialize, Serialize};

/// Which side of the mask the generator sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskSide {
    /// Context is `s_1 .. s_{k-1}`; the mask is implied at the end.
    PrefixKept,
    /// Context is `s_{k+1} .. s_n`; the mask is implied at the start.
    SuffixKept,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationRequest {
    pub context_sentences: Vec<String>,
    pub mask_side: MaskSide,
    pub max_new_tokens: u32,
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationResponse {
    pub substitute: String,
    pub model_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreRequest {
    pub sentences: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreResponse {
    pub coherence: f64,
    pub model_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
    pub generator_model_id: Option<String>,
    pub scorer_model_id: Option<String>,
}

/// Envelope of the batch endpoints, in both directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Batch<T> {
    pub items: Vec<T>,
}
