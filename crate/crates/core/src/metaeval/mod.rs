//! Meta-evaluation of scorers against human judgements.
//!
//! For `n` documents with `J` system outputs each, sample-level correlation is the
//! mean over documents of `K(model scores of document i, human scores of document i)`;
//! dataset-level correlation is `K` over all `n * J` cells at once. Documents whose
//! per-document correlation is undefined (for example constant human ratings) are left
//! out of the sample-level mean and listed in the report.

mod correlation;
mod loaders;
mod ranking;

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use correlation::{average_ranks, kendall, pearson, spearman, CorrelationError, Measure};
pub use loaders::{read_pairs, read_ratings, read_scores, write_scores};
pub use ranking::{pairs_from_dataset, ranking_accuracy, RankingPair, RankingSummary};

use crate::corpus::Discourse;
use crate::scoring::{unified_score, ScorerBackend, ScoringError, UnifiedScoringConfig};

#[derive(Debug, Error)]
pub enum MetaEvalError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("shape mismatch for document {doc_id}: {detail}")]
    ShapeMismatch { doc_id: String, detail: String },
    #[error("scoring {doc_id}/{system_id}: {source}")]
    Scoring {
        doc_id: String,
        system_id: String,
        #[source]
        source: ScoringError,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemOutput {
    pub system_id: String,
    pub discourse: Discourse,
    pub human: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatedDocument {
    pub doc_id: String,
    pub outputs: Vec<SystemOutput>,
}

/// Documents by systems, with one human score per cell. Every document carries the
/// same set of systems.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RatingMatrix {
    documents: Vec<RatedDocument>,
}

impl RatingMatrix {
    pub fn new(documents: Vec<RatedDocument>) -> Result<Self, MetaEvalError> {
        let mut doc_ids = HashSet::new();
        let mut reference: Option<Vec<&str>> = None;
        for d in &documents {
            if !doc_ids.insert(d.doc_id.as_str()) {
                return Err(MetaEvalError::InvalidInput(format!("duplicate document {}", d.doc_id)));
            }
            let mut systems: Vec<&str> = d.outputs.iter().map(|o| o.system_id.as_str()).collect();
            systems.sort_unstable();
            if systems.windows(2).any(|w| w[0] == w[1]) {
                return Err(MetaEvalError::ShapeMismatch {
                    doc_id: d.doc_id.clone(),
                    detail: "a system appears twice".into(),
                });
            }
            if let Some(o) = d.outputs.iter().find(|o| !o.human.is_finite()) {
                return Err(MetaEvalError::InvalidInput(format!(
                    "non-finite human score for {}/{}",
                    d.doc_id, o.system_id
                )));
            }
            match &reference {
                None => reference = Some(systems),
                Some(r) if *r != systems => {
                    return Err(MetaEvalError::ShapeMismatch {
                        doc_id: d.doc_id.clone(),
                        detail: format!("systems {systems:?} differ from {r:?}"),
                    })
                }
                Some(_) => {}
            }
        }
        Ok(Self { documents })
    }

    pub fn documents(&self) -> &[RatedDocument] {
        &self.documents
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn n_cells(&self) -> usize {
        self.documents.iter().map(|d| d.outputs.len()).sum()
    }
}

/// Model scores keyed by document id, then system id.
pub type ModelScores = BTreeMap<String, BTreeMap<String, f64>>;

/// Scores every cell with the unified scorer.
pub fn score_matrix<S: ScorerBackend + ?Sized>(
    matrix: &RatingMatrix,
    backend: &S,
    config: &UnifiedScoringConfig,
) -> Result<ModelScores, MetaEvalError> {
    let mut out = ModelScores::new();
    for d in matrix.documents() {
        let row = out.entry(d.doc_id.clone()).or_default();
        for o in &d.outputs {
            let b = unified_score(backend, &o.discourse, config).map_err(|source| {
                MetaEvalError::Scoring {
                    doc_id: d.doc_id.clone(),
                    system_id: o.system_id.clone(),
                    source,
                }
            })?;
            row.insert(o.system_id.clone(), b.final_score);
        }
    }
    Ok(out)
}

/// Model and human vectors per document, in matrix order.
struct Aligned<'a> {
    doc_id: &'a str,
    model: Vec<f64>,
    human: Vec<f64>,
    lengths: Vec<usize>,
}

fn align<'a>(matrix: &'a RatingMatrix, scores: &ModelScores) -> Result<Vec<Aligned<'a>>, MetaEvalError> {
    if matrix.is_empty() {
        return Err(MetaEvalError::InvalidInput("rating matrix is empty".into()));
    }
    let known: HashSet<&str> = matrix.documents().iter().map(|d| d.doc_id.as_str()).collect();
    if let Some(extra) = scores.keys().find(|k| !known.contains(k.as_str())) {
        return Err(MetaEvalError::ShapeMismatch {
            doc_id: extra.clone(),
            detail: "scored but absent from the ratings".into(),
        });
    }
    matrix
        .documents()
        .iter()
        .map(|d| {
            let row = scores.get(&d.doc_id).ok_or_else(|| MetaEvalError::ShapeMismatch {
                doc_id: d.doc_id.clone(),
                detail: "no model scores".into(),
            })?;
            if row.len() != d.outputs.len() {
                return Err(MetaEvalError::ShapeMismatch {
                    doc_id: d.doc_id.clone(),
                    detail: format!("{} model scores for {} rated outputs", row.len(), d.outputs.len()),
                });
            }
            let mut model = Vec::with_capacity(d.outputs.len());
            for o in &d.outputs {
                let v = *row.get(&o.system_id).ok_or_else(|| MetaEvalError::ShapeMismatch {
                    doc_id: d.doc_id.clone(),
                    detail: format!("no model score for system {}", o.system_id),
                })?;
                if !v.is_finite() {
                    return Err(MetaEvalError::InvalidInput(format!(
                        "non-finite model score for {}/{}",
                        d.doc_id, o.system_id
                    )));
                }
                model.push(v);
            }
            Ok(Aligned {
                doc_id: &d.doc_id,
                model,
                human: d.outputs.iter().map(|o| o.human).collect(),
                lengths: d.outputs.iter().map(|o| o.discourse.len()).collect(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Sample,
    Dataset,
}

/// A coefficient, or the reason it could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Coefficient {
    fn from_result(r: Result<f64, CorrelationError>) -> Self {
        match r {
            Ok(v) => Self::present(v),
            Err(e) => Self::absent(e.to_string()),
        }
    }

    pub fn present(v: f64) -> Self {
        Self { value: Some(v), reason: None }
    }

    pub fn absent(reason: impl Into<String>) -> Self {
        Self { value: None, reason: Some(reason.into()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedDocument {
    pub doc_id: String,
    /// One entry per measure that was undefined, e.g. `"rho: undefined: constant input vector"`.
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub level: Level,
    pub n_documents: usize,
    pub n_cells: usize,
    pub rho: Coefficient,
    pub r: Coefficient,
    pub tau: Coefficient,
    pub skipped_documents: Vec<SkippedDocument>,
}

impl CorrelationReport {
    pub fn coefficient(&self, m: Measure) -> &Coefficient {
        match m {
            Measure::Spearman => &self.rho,
            Measure::Pearson => &self.r,
            Measure::Kendall => &self.tau,
        }
    }

    /// Mean of the three coefficients when all are defined.
    pub fn mean(&self) -> Option<f64> {
        let vals: Option<Vec<f64>> = Measure::ALL.iter().map(|&m| self.coefficient(m).value).collect();
        vals.map(|v| v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// Result of one measure at sample level.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleLevel {
    pub value: Coefficient,
    /// `(doc_id, reason)` for documents left out of the mean.
    pub skipped: Vec<(String, String)>,
}

pub fn sample_level(
    measure: Measure,
    matrix: &RatingMatrix,
    scores: &ModelScores,
) -> Result<SampleLevel, MetaEvalError> {
    let aligned = align(matrix, scores)?;
    Ok(sample_level_aligned(measure, &aligned))
}

fn sample_level_aligned(measure: Measure, aligned: &[Aligned<'_>]) -> SampleLevel {
    let mut sum = 0.0;
    let mut used = 0usize;
    let mut skipped = Vec::new();
    for a in aligned {
        match measure.apply(&a.model, &a.human) {
            Ok(v) => {
                sum += v;
                used += 1;
            }
            Err(e) => skipped.push((a.doc_id.to_owned(), e.to_string())),
        }
    }
    let value = if used == 0 {
        Coefficient::absent("no document has a defined correlation")
    } else {
        Coefficient::present(sum / used as f64)
    };
    SampleLevel { value, skipped }
}

pub fn dataset_level(
    measure: Measure,
    matrix: &RatingMatrix,
    scores: &ModelScores,
) -> Result<Coefficient, MetaEvalError> {
    let aligned = align(matrix, scores)?;
    let (model, human) = flatten(&aligned);
    Ok(Coefficient::from_result(measure.apply(&model, &human)))
}

fn flatten(aligned: &[Aligned<'_>]) -> (Vec<f64>, Vec<f64>) {
    let model = aligned.iter().flat_map(|a| a.model.iter().copied()).collect();
    let human = aligned.iter().flat_map(|a| a.human.iter().copied()).collect();
    (model, human)
}

pub fn sample_level_report(matrix: &RatingMatrix, scores: &ModelScores) -> Result<CorrelationReport, MetaEvalError> {
    let aligned = align(matrix, scores)?;
    let mut per_measure = Measure::ALL.map(|m| (m, sample_level_aligned(m, &aligned)));
    let mut skipped: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (m, s) in &mut per_measure {
        for (doc, reason) in s.skipped.drain(..) {
            skipped.entry(doc).or_default().push(format!("{}: {reason}", m.symbol()));
        }
    }
    let order: Vec<&str> = aligned.iter().map(|a| a.doc_id).collect();
    let mut skipped_documents: Vec<SkippedDocument> = skipped
        .into_iter()
        .map(|(doc_id, reasons)| SkippedDocument { doc_id, reasons })
        .collect();
    skipped_documents.sort_by_key(|s| order.iter().position(|d| *d == s.doc_id));
    let [rho, r, tau] = per_measure.map(|(_, s)| s.value);
    Ok(CorrelationReport {
        level: Level::Sample,
        n_documents: aligned.len(),
        n_cells: aligned.iter().map(|a| a.model.len()).sum(),
        rho,
        r,
        tau,
        skipped_documents,
    })
}

pub fn dataset_level_report(matrix: &RatingMatrix, scores: &ModelScores) -> Result<CorrelationReport, MetaEvalError> {
    let aligned = align(matrix, scores)?;
    let (model, human) = flatten(&aligned);
    Ok(dataset_report(&model, &human, aligned.len()))
}

fn dataset_report(model: &[f64], human: &[f64], n_documents: usize) -> CorrelationReport {
    let [rho, r, tau] = Measure::ALL.map(|m| Coefficient::from_result(m.apply(model, human)));
    CorrelationReport {
        level: Level::Dataset,
        n_documents,
        n_cells: model.len(),
        rho,
        r,
        tau,
        skipped_documents: Vec::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketReport {
    pub n_sentences: usize,
    pub n_outputs: usize,
    pub report: CorrelationReport,
    /// Mean of the three dataset-level coefficients, when all are defined.
    pub mean: Option<f64>,
}

/// Dataset-level correlations per output sentence count, in ascending order.
pub fn length_bucket_report(matrix: &RatingMatrix, scores: &ModelScores) -> Result<Vec<BucketReport>, MetaEvalError> {
    let aligned = align(matrix, scores)?;
    // model scores, human scores, contributing documents
    type Bucket<'a> = (Vec<f64>, Vec<f64>, HashSet<&'a str>);
    let mut buckets: BTreeMap<usize, Bucket<'_>> = BTreeMap::new();
    for a in &aligned {
        for ((&m, &h), &len) in a.model.iter().zip(&a.human).zip(&a.lengths) {
            let b = buckets.entry(len).or_default();
            b.0.push(m);
            b.1.push(h);
            b.2.insert(a.doc_id);
        }
    }
    Ok(buckets
        .into_iter()
        .map(|(n_sentences, (model, human, docs))| {
            let report = dataset_report(&model, &human, docs.len());
            BucketReport {
                n_sentences,
                n_outputs: model.len(),
                mean: report.mean(),
                report,
            }
        })
        .collect())
}
