//! Rule-based substitute selection by n-gram overlap.
//!
//! Sentences are lowercased and stripped of punctuation before n-grams are taken.
//! Overlap is the clipped multiset count `sum_g min(count_query(g), count_candidate(g))`.
//! The highest-overlap sentence wins; ties go to the earliest sentence in pool order.

use std::collections::HashMap;

use super::AugmentError;
use crate::corpus::Discourse;
use crate::text::normalized_tokens;

type NgramCounts = HashMap<String, usize>;

fn ngram_counts(sentence: &str, n: usize) -> NgramCounts {
    let tokens = normalized_tokens(sentence);
    let mut counts = NgramCounts::new();
    if n == 0 || tokens.len() < n {
        return counts;
    }
    for w in tokens.windows(n) {
        *counts.entry(w.join(" ")).or_default() += 1;
    }
    counts
}

fn overlap_counts(query: &NgramCounts, candidate: &NgramCounts) -> usize {
    query
        .iter()
        .map(|(g, &c)| c.min(candidate.get(g).copied().unwrap_or(0)))
        .sum()
}

/// Clipped n-gram overlap count between two sentences.
pub fn ngram_overlap(a: &str, b: &str, n: usize) -> usize {
    overlap_counts(&ngram_counts(a, n), &ngram_counts(b, n))
}

/// Pre-tokenised candidate sentences from a pool of discourses.
#[derive(Debug, Clone)]
pub struct NgramPool {
    order: usize,
    entries: Vec<(String, String, NgramCounts)>,
}

impl NgramPool {
    pub fn new(pool: &[Discourse], order: usize) -> Self {
        let entries = pool
            .iter()
            .flat_map(|d| {
                d.sentences()
                    .iter()
                    .map(move |s| (d.origin_id().to_owned(), s.clone(), ngram_counts(s, order)))
            })
            .collect();
        Self { order, entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Best-overlap sentence for `query`, skipping sentences from `exclude_origin`.
    pub fn best(&self, query: &str, exclude_origin: &str) -> Option<(&str, usize)> {
        let q = ngram_counts(query, self.order);
        let mut best: Option<(&str, usize)> = None;
        for (origin, sentence, counts) in &self.entries {
            if origin == exclude_origin {
                continue;
            }
            let score = overlap_counts(&q, counts);
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((sentence, score));
            }
        }
        best
    }
}

/// Picks the pool sentence with the highest n-gram overlap with sentence `k` (1-based)
/// of `discourse`.
pub fn rule_based_substitute(
    discourse: &Discourse,
    k: usize,
    pool: &[Discourse],
    ngram_order: usize,
) -> Result<String, AugmentError> {
    let target = discourse.sentence(k).ok_or_else(|| {
        AugmentError::InvalidInput(format!("position {k} outside 1..={}", discourse.len()))
    })?;
    if ngram_order == 0 {
        return Err(AugmentError::InvalidInput("ngram_order must be at least 1".into()));
    }
    if pool.is_empty() {
        return Err(AugmentError::InvalidInput("substitute pool is empty".into()));
    }
    if pool.iter().any(|d| d.origin_id() == discourse.origin_id()) {
        return Err(AugmentError::InvalidInput(format!(
            "pool contains the source discourse origin {}",
            discourse.origin_id()
        )));
    }
    let index = NgramPool::new(pool, ngram_order);
    let (sentence, _) = index
        .best(target, discourse.origin_id())
        .expect("non-empty pool always yields a candidate");
    Ok(sentence.to_owned())
}
