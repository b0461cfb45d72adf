//! Documents, discourses, labelled samples and the dataset file format.

mod dataset;
mod segment;

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dataset::{check_integrity, read_dataset, read_documents, write_dataset};
pub use segment::segment_sentences;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("document {id} has {available} sentences, at least {needed} required")]
    TooShort {
        id: String,
        needed: usize,
        available: usize,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("integrity violation: {0}")]
    Integrity(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    News,
    Encyclopedia,
    #[default]
    Other,
}

/// A raw source document before segmentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub source: Source,
}

impl Document {
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        source: Source,
    ) -> Result<Self, CorpusError> {
        let doc = Self {
            id: id.into(),
            text: text.into(),
            source,
        };
        doc.validate()?;
        Ok(doc)
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.id.is_empty() {
            return Err(CorpusError::InvalidInput("document id is empty".into()));
        }
        if self.text.trim().is_empty() {
            return Err(CorpusError::InvalidInput(format!(
                "document {} has empty text",
                self.id
            )));
        }
        Ok(())
    }
}

/// An ordered, non-empty sequence of sentences.
///
/// Equality is order-sensitive and includes the origin id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Discourse {
    sentences: Vec<String>,
    origin_id: String,
}

impl Discourse {
    pub fn new(sentences: Vec<String>, origin_id: impl Into<String>) -> Result<Self, CorpusError> {
        let origin_id = origin_id.into();
        if sentences.is_empty() {
            return Err(CorpusError::InvalidInput(format!(
                "discourse from {origin_id} has no sentences"
            )));
        }
        if let Some(i) = sentences.iter().position(|s| s.trim().is_empty()) {
            return Err(CorpusError::InvalidInput(format!(
                "discourse from {origin_id} has an empty sentence at position {}",
                i + 1
            )));
        }
        Ok(Self {
            sentences,
            origin_id,
        })
    }

    pub fn sentences(&self) -> &[String] {
        &self.sentences
    }

    pub fn origin_id(&self) -> &str {
        &self.origin_id
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// 1-based sentence access.
    pub fn sentence(&self, position: usize) -> Option<&str> {
        position
            .checked_sub(1)
            .and_then(|i| self.sentences.get(i))
            .map(String::as_str)
    }

    /// Returns a copy with the sentence at 1-based `position` replaced.
    pub fn with_replaced(&self, position: usize, sentence: String) -> Result<Self, CorpusError> {
        if position == 0 || position > self.len() {
            return Err(CorpusError::InvalidInput(format!(
                "position {position} outside 1..={}",
                self.len()
            )));
        }
        let mut sentences = self.sentences.clone();
        sentences[position - 1] = sentence;
        Self::new(sentences, self.origin_id.clone())
    }

    /// Two-sentence discourse made of the sentences at 0-based `i` and `i + 1`.
    pub fn adjacent_pair(&self, i: usize) -> Option<Self> {
        let pair = self.sentences.get(i..i + 2)?;
        Some(Self {
            sentences: pair.to_vec(),
            origin_id: self.origin_id.clone(),
        })
    }

    pub fn into_sentences(self) -> Vec<String> {
        self.sentences
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Coherent,
    Incoherent,
}

/// How a sample was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Original,
    GlobalShuffle,
    LocalGenerative,
    LocalRule,
}

/// A discourse with its label.
///
/// All members of one positive/negative group share `pair_id`; the group has
/// exactly one coherent member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSample {
    pub id: String,
    pub discourse: Discourse,
    pub label: Label,
    pub provenance: Provenance,
    pub pair_id: String,
}

impl LabeledSample {
    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.id.is_empty() {
            return Err(CorpusError::InvalidInput("sample id is empty".into()));
        }
        if self.pair_id.is_empty() {
            return Err(CorpusError::InvalidInput(format!(
                "sample {} has an empty pair_id",
                self.id
            )));
        }
        let original = self.provenance == Provenance::Original;
        let coherent = self.label == Label::Coherent;
        if original != coherent {
            return Err(CorpusError::InvalidInput(format!(
                "sample {}: provenance {:?} is inconsistent with label {:?}",
                self.id, self.provenance, self.label
            )));
        }
        Ok(())
    }
}

/// Draws `k` uniformly from `[min_n, min(max_n, available)]` and returns the first `k`
/// sentences of the document.
pub fn sample_leading<R: Rng + ?Sized>(
    doc: &Document,
    rng: &mut R,
    min_n: usize,
    max_n: usize,
) -> Result<Discourse, CorpusError> {
    if min_n == 0 || min_n > max_n {
        return Err(CorpusError::InvalidInput(format!(
            "need 1 <= min_n <= max_n, got {min_n} and {max_n}"
        )));
    }
    doc.validate()?;
    let sentences = segment_sentences(&doc.text)?;
    if sentences.len() < min_n {
        return Err(CorpusError::TooShort {
            id: doc.id.clone(),
            needed: min_n,
            available: sentences.len(),
        });
    }
    let upper = max_n.min(sentences.len());
    // u64 sampling keeps the draw identical on 32- and 64-bit targets
    let k = rng.gen_range(min_n as u64..=upper as u64) as usize;
    let mut sentences = sentences;
    sentences.truncate(k);
    Discourse::new(sentences, doc.id.clone())
}

/// Splits samples into (train, valid) by whole pair groups.
///
/// Groups are visited in a seeded random order and moved to the validation side while
/// they still fit under `round(valid_fraction * len)`. Both sides keep the input order.
pub fn split_dataset<R: Rng + ?Sized>(
    samples: &[LabeledSample],
    valid_fraction: f64,
    rng: &mut R,
) -> Result<(Vec<LabeledSample>, Vec<LabeledSample>), CorpusError> {
    if !(valid_fraction > 0.0 && valid_fraction < 1.0) {
        return Err(CorpusError::InvalidInput(format!(
            "valid_fraction must lie in (0, 1), got {valid_fraction}"
        )));
    }
    let mut group_order: Vec<&str> = Vec::new();
    let mut group_sizes: HashMap<&str, usize> = HashMap::new();
    for s in samples {
        let size = group_sizes.entry(s.pair_id.as_str()).or_insert(0);
        if *size == 0 {
            group_order.push(s.pair_id.as_str());
        }
        *size += 1;
    }
    let target = (valid_fraction * samples.len() as f64).round() as usize;
    group_order.shuffle(rng);

    let mut valid_groups = std::collections::HashSet::new();
    let mut filled = 0usize;
    for g in group_order {
        let size = group_sizes[g];
        if filled + size <= target {
            filled += size;
            valid_groups.insert(g);
        }
        if filled == target {
            break;
        }
    }
    let (valid, train): (Vec<_>, Vec<_>) = samples
        .iter()
        .cloned()
        .partition(|s| valid_groups.contains(s.pair_id.as_str()));
    Ok((train, valid))
}
