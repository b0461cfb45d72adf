//! Lexical-overlap scorer used as a hermetic backend and as the offline filter.

use std::collections::BTreeSet;

use super::ScorerBackend;
use crate::backend::BackendError;
use crate::corpus::Discourse;
use crate::text::normalized_tokens;

pub const STOP_WORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are",
    "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but",
    "by", "can", "could", "did", "do", "does", "doing", "down", "during", "each", "few", "for",
    "from", "further", "had", "has", "have", "having", "he", "her", "here", "hers", "herself",
    "him", "himself", "his", "how", "i", "if", "in", "into", "is", "it", "its", "itself", "just",
    "me", "more", "most", "my", "myself", "no", "nor", "not", "now", "of", "off", "on", "once",
    "only", "or", "other", "our", "ours", "ourselves", "out", "over", "own", "same", "she",
    "should", "so", "some", "such", "than", "that", "the", "their", "theirs", "them",
    "themselves", "then", "there", "these", "they", "this", "those", "through", "to", "too",
    "under", "until", "up", "very", "was", "we", "were", "what", "when", "where", "which",
    "while", "who", "whom", "why", "will", "with", "would", "you", "your", "yours", "yourself",
    "yourselves",
];

fn content_words(sentence: &str) -> BTreeSet<String> {
    normalized_tokens(sentence)
        .into_iter()
        .filter(|t| STOP_WORDS.binary_search(&t.as_str()).is_err())
        .collect()
}

/// Jaccard overlap of content words; 0.5 when neither sentence has any.
fn pair_overlap(a: &str, b: &str) -> f64 {
    let (a, b) = (content_words(a), content_words(b));
    let union = a.union(&b).count();
    if union == 0 {
        return 0.5;
    }
    a.intersection(&b).count() as f64 / union as f64
}

/// Mean content-word Jaccard overlap over adjacent sentence pairs.
///
/// A single sentence carries no transition evidence and scores 0.5.
pub fn heuristic_score(discourse: &Discourse) -> f64 {
    let s = discourse.sentences();
    if s.len() < 2 {
        return 0.5;
    }
    let total: f64 = s.windows(2).map(|w| pair_overlap(&w[0], &w[1])).sum();
    total / (s.len() - 1) as f64
}

#[derive(Debug, Clone, Copy, Default)]
pub struct HeuristicScorer;

impl ScorerBackend for HeuristicScorer {
    fn score(&self, discourse: &Discourse) -> Result<f64, BackendError> {
        Ok(heuristic_score(discourse))
    }

    fn identity(&self) -> String {
        "heuristic:content-jaccard".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(sents: &[&str]) -> Discourse {
        Discourse::new(sents.iter().map(|s| s.to_string()).collect(), "t").unwrap()
    }

    #[test]
    fn stop_words_are_sorted_for_binary_search() {
        assert!(STOP_WORDS.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn identical_sentences_score_one() {
        assert_eq!(heuristic_score(&disc(&["The cat sat.", "The cat sat."])), 1.0);
    }

    #[test]
    fn disjoint_sentences_score_zero() {
        assert_eq!(heuristic_score(&disc(&["Dogs bark loudly.", "Stocks fell sharply."])), 0.0);
    }

    #[test]
    fn hand_enumerated_overlap() {
        // {cat, sat} vs {cat, slept}: shared {cat}, union {cat, sat, slept}
        let v = heuristic_score(&disc(&["the cat sat", "the cat slept"]));
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn single_sentence_is_neutral() {
        assert_eq!(heuristic_score(&disc(&["Alone."])), 0.5);
    }
}
