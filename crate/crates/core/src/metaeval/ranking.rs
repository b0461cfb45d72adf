use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::MetaEvalError;
use crate::corpus::{Discourse, Label, LabeledSample};
use crate::scoring::{pairwise_rank, ScorerBackend, UnifiedScoringConfig, Verdict};

/// Two candidates and, optionally, which one is more coherent.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingPair {
    pub id: String,
    pub a: Discourse,
    pub b: Discourse,
    /// `A` or `B`; `None` for unlabelled pairs.
    pub gold: Option<Verdict>,
}

impl RankingPair {
    pub fn swapped(&self) -> Self {
        Self {
            id: self.id.clone(),
            a: self.b.clone(),
            b: self.a.clone(),
            gold: self.gold.map(Verdict::swapped),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingSummary {
    pub n_pairs: usize,
    pub n_labelled: usize,
    pub correct: usize,
    pub ties: usize,
    pub incorrect: usize,
    /// `(correct + ties / 2) / n_labelled`; absent without labelled pairs.
    pub accuracy: Option<f64>,
    pub verdicts: Vec<Verdict>,
}

impl RankingSummary {
    /// Summarises `(gold, verdict)` outcomes; ties earn half credit.
    pub fn tally(outcomes: &[(Option<Verdict>, Verdict)]) -> Self {
        let mut summary = Self {
            n_pairs: outcomes.len(),
            n_labelled: 0,
            correct: 0,
            ties: 0,
            incorrect: 0,
            accuracy: None,
            verdicts: outcomes.iter().map(|o| o.1).collect(),
        };
        for &(gold, v) in outcomes {
            let Some(gold) = gold else { continue };
            summary.n_labelled += 1;
            if v == Verdict::Tie {
                summary.ties += 1;
            } else if v == gold {
                summary.correct += 1;
            } else {
                summary.incorrect += 1;
            }
        }
        if summary.n_labelled > 0 {
            summary.accuracy =
                Some((summary.correct as f64 + 0.5 * summary.ties as f64) / summary.n_labelled as f64);
        }
        summary
    }
}

/// Ranks every pair and scores agreement with the gold labels, giving half credit to
/// ties.
pub fn ranking_accuracy<S: ScorerBackend + ?Sized>(
    pairs: &[RankingPair],
    scorer: &S,
    config: &UnifiedScoringConfig,
) -> Result<RankingSummary, MetaEvalError> {
    if pairs.is_empty() {
        return Err(MetaEvalError::InvalidInput("no pairs to rank".into()));
    }
    if let Some(p) = pairs.iter().find(|p| p.gold == Some(Verdict::Tie)) {
        return Err(MetaEvalError::InvalidInput(format!("pair {} has a tie as gold label", p.id)));
    }
    let mut outcomes = Vec::with_capacity(pairs.len());
    for p in pairs {
        let v = pairwise_rank(scorer, &p.a, &p.b, config).map_err(|source| MetaEvalError::Scoring {
            doc_id: p.id.clone(),
            system_id: String::new(),
            source,
        })?;
        outcomes.push((p.gold, v));
    }
    Ok(RankingSummary::tally(&outcomes))
}

/// One (positive, negative) pair per incoherent sample, positive first.
pub fn pairs_from_dataset(samples: &[LabeledSample]) -> Vec<RankingPair> {
    let positives: HashMap<&str, &LabeledSample> = samples
        .iter()
        .filter(|s| s.label == Label::Coherent)
        .map(|s| (s.pair_id.as_str(), s))
        .collect();
    samples
        .iter()
        .filter(|s| s.label == Label::Incoherent)
        .filter_map(|neg| {
            positives.get(neg.pair_id.as_str()).map(|pos| RankingPair {
                id: neg.id.clone(),
                a: pos.discourse.clone(),
                b: neg.discourse.clone(),
                gold: Some(Verdict::A),
            })
        })
        .collect()
}
