//! Label-table scorer for tests and end-to-end checks.

use std::collections::HashMap;

use super::ScorerBackend;
use crate::backend::BackendError;
use crate::corpus::{Discourse, Label, LabeledSample};

/// Answers 1.0 for discourses labelled coherent and 0.0 for incoherent ones.
///
/// Built from a dataset, the table also covers every adjacent sentence pair so the
/// unified scorer can query it: a pair is coherent if it is adjacent in some coherent
/// sample, otherwise incoherent if it is adjacent in some incoherent sample. Whole
/// samples keep their own label. Lookups are by sentence content.
#[derive(Debug, Clone, Default)]
pub struct OracleScorer {
    table: HashMap<Vec<String>, Label>,
    inverted: bool,
}

impl OracleScorer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_samples(samples: &[LabeledSample]) -> Self {
        let mut table: HashMap<Vec<String>, Label> = HashMap::new();
        for s in samples.iter().filter(|s| s.label == Label::Incoherent) {
            for w in s.discourse.sentences().windows(2) {
                table.insert(w.to_vec(), Label::Incoherent);
            }
        }
        for s in samples.iter().filter(|s| s.label == Label::Coherent) {
            for w in s.discourse.sentences().windows(2) {
                table.insert(w.to_vec(), Label::Coherent);
            }
        }
        for s in samples {
            table.insert(s.discourse.sentences().to_vec(), s.label);
        }
        Self {
            table,
            inverted: false,
        }
    }

    pub fn insert(&mut self, sentences: Vec<String>, label: Label) {
        self.table.insert(sentences, label);
    }

    /// Same table, opposite answers.
    pub fn inverted(mut self) -> Self {
        self.inverted = !self.inverted;
        self
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl ScorerBackend for OracleScorer {
    fn score(&self, discourse: &Discourse) -> Result<f64, BackendError> {
        let label = self
            .table
            .get(discourse.sentences())
            .ok_or_else(|| BackendError::UnknownDiscourse(discourse.sentences().join(" ")))?;
        let coherent = (*label == Label::Coherent) != self.inverted;
        Ok(if coherent { 1.0 } else { 0.0 })
    }

    fn identity(&self) -> String {
        if self.inverted {
            "oracle:inverted".into()
        } else {
            "oracle".into()
        }
    }
}
