//! Incoherent negative construction and training-set assembly.
//!
//! Two families of negatives are built from coherent discourses:
//!
//! - global: the sentence order is permuted (never the identity);
//! - local: one interior sentence `s_k` (`1 < k < n`) is replaced. The generative
//!   strategy asks a generator for a substitute given only the context on one side of
//!   the mask; the rule strategy takes the pool sentence with the largest n-gram overlap
//!   with `s_k`. Local negatives whose filter score is below the threshold are dropped.
//!
//! [`build_dataset`] assembles positives and negatives so that the dataset size is
//! always `2 * (global negatives + kept local negatives)`.

mod build;
mod global;
mod local;
mod rule;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use build::{build_dataset, counting_total, sample_sources, BuildCounts, BuildOutput, BuildReport};
pub use global::global_shuffle;
pub use local::{
    apply_threshold, coherence_filter, generate_substitute, score_candidates, select_mask_index,
    truncate_context, CandidatePair, ExchangeStatus, GenerationExchange, GenerationSettings,
    MaskedContext, SideKept,
};
pub use rule::{ngram_overlap, rule_based_substitute, NgramPool};

use crate::backend::{BackendError, RetryPolicy};
use crate::corpus::CorpusError;

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error("discourse has {n} sentence(s); at least 2 are needed")]
    TooShort { n: usize },
    #[error("discourse has {n} sentence(s); no interior position exists")]
    NoInterior { n: usize },
    #[error("every sentence is identical, no non-identity ordering exists")]
    Degenerate,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid augmentation config: {0}")]
    InvalidConfig(String),
    #[error("generator returned an empty sentence")]
    EmptyGeneration,
    #[error("insufficient data: {what} needs {needed}, only {available} available (short by {})", needed - available)]
    InsufficientData {
        what: String,
        needed: usize,
        available: usize,
    },
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// How interior sentences are replaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LocalStrategy {
    #[default]
    Generative,
    Rule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentationConfig {
    pub min_sentences: usize,
    pub max_sentences: usize,
    /// Local negatives with a filter score below this value are dropped.
    pub filter_threshold: f64,
    /// Share of sources turned into shuffled negatives when no explicit counts are set.
    pub global_fraction: f64,
    /// Explicit number of global negatives; overrides `global_fraction`.
    pub global_count: Option<usize>,
    /// Explicit number of local candidates; used together with `global_count`.
    pub local_count: Option<usize>,
    pub seed: u64,
    pub ngram_order: usize,
    pub local_strategy: LocalStrategy,
    pub workers: usize,
    pub max_new_tokens: u32,
    pub temperature: f64,
    pub retry: RetryPolicy,
}

impl Default for AugmentationConfig {
    fn default() -> Self {
        Self {
            min_sentences: 2,
            max_sentences: 5,
            filter_threshold: 0.5,
            global_fraction: 0.25,
            global_count: None,
            local_count: None,
            seed: 0,
            ngram_order: 2,
            local_strategy: LocalStrategy::Generative,
            workers: 1,
            max_new_tokens: 64,
            temperature: 0.7,
            retry: RetryPolicy::default(),
        }
    }
}

impl AugmentationConfig {
    pub fn validate(&self) -> Result<(), AugmentError> {
        let bad = |m: String| Err(AugmentError::InvalidConfig(m));
        if !(2 <= self.min_sentences && self.min_sentences <= self.max_sentences) {
            return bad(format!(
                "need 2 <= min_sentences <= max_sentences, got {} and {}",
                self.min_sentences, self.max_sentences
            ));
        }
        if !(0.0..=1.0).contains(&self.filter_threshold) {
            return bad(format!("filter_threshold must lie in [0, 1], got {}", self.filter_threshold));
        }
        if !(0.0..=1.0).contains(&self.global_fraction) {
            return bad(format!("global_fraction must lie in [0, 1], got {}", self.global_fraction));
        }
        if self.global_count.is_some() != self.local_count.is_some() {
            return bad("global_count and local_count must be set together".into());
        }
        if self.ngram_order == 0 {
            return bad("ngram_order must be at least 1".into());
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return bad(format!("temperature must be finite and non-negative, got {}", self.temperature));
        }
        Ok(())
    }

    pub fn generation_settings(&self) -> GenerationSettings {
        GenerationSettings {
            max_new_tokens: self.max_new_tokens,
            temperature: self.temperature,
            retry: self.retry,
        }
    }
}
