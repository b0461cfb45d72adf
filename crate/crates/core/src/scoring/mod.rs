//! Scorer backends and unified global + local coherence scoring.
//!
//! A backend maps a discourse to a coherence score in `[0, 1]`. The unified score of
//! an `n`-sentence discourse interpolates the whole-discourse score with the mean of
//! the `n - 1` adjacent-pair scores:
//!
//! ```text
//! final = (1 - lambda) * global + lambda * mean(pair_scores)
//! ```
//!
//! Adjacent pairs are scored as ordinary two-sentence discourses. A one-sentence
//! discourse has no pairs, so its final score is the global score.

mod heuristic;
mod oracle;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use heuristic::{heuristic_score, HeuristicScorer, STOP_WORDS};
pub use oracle::OracleScorer;

use crate::backend::BackendError;
use crate::corpus::Discourse;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ScoringError {
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("invalid scoring config: {0}")]
    InvalidConfig(String),
}

/// Anything that assigns a coherence score in `[0, 1]` to a discourse.
pub trait ScorerBackend: Send + Sync {
    fn score(&self, discourse: &Discourse) -> Result<f64, BackendError>;

    fn identity(&self) -> String;

    /// Serial-only backends return false and are driven from a single worker.
    fn supports_concurrency(&self) -> bool {
        true
    }
}

impl<T: ScorerBackend + ?Sized> ScorerBackend for &T {
    fn score(&self, discourse: &Discourse) -> Result<f64, BackendError> {
        (**self).score(discourse)
    }
    fn identity(&self) -> String {
        (**self).identity()
    }
    fn supports_concurrency(&self) -> bool {
        (**self).supports_concurrency()
    }
}

impl<T: ScorerBackend + ?Sized> ScorerBackend for Box<T> {
    fn score(&self, discourse: &Discourse) -> Result<f64, BackendError> {
        (**self).score(discourse)
    }
    fn identity(&self) -> String {
        (**self).identity()
    }
    fn supports_concurrency(&self) -> bool {
        (**self).supports_concurrency()
    }
}

/// Calls the backend and rejects values outside `[0, 1]` (including NaN) instead of
/// clamping them.
pub fn checked_score<S: ScorerBackend + ?Sized>(
    backend: &S,
    discourse: &Discourse,
) -> Result<f64, BackendError> {
    let v = backend.score(discourse)?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(BackendError::OutOfRange(v))
    }
}

/// Returns the same value for every input.
#[derive(Debug, Clone, Copy)]
pub struct ConstantScorer(pub f64);

impl ScorerBackend for ConstantScorer {
    fn score(&self, _discourse: &Discourse) -> Result<f64, BackendError> {
        Ok(self.0)
    }

    fn identity(&self) -> String {
        format!("constant:{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UnifiedScoringConfig {
    pub lambda: f64,
    pub tie_epsilon: f64,
}

impl Default for UnifiedScoringConfig {
    fn default() -> Self {
        Self {
            lambda: 0.5,
            tie_epsilon: 1e-9,
        }
    }
}

impl UnifiedScoringConfig {
    pub fn with_lambda(lambda: f64) -> Self {
        Self {
            lambda,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ScoringError> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(ScoringError::InvalidConfig(format!(
                "lambda must lie in [0, 1], got {}",
                self.lambda
            )));
        }
        if !(self.tie_epsilon >= 0.0 && self.tie_epsilon.is_finite()) {
            return Err(ScoringError::InvalidConfig(format!(
                "tie_epsilon must be finite and non-negative, got {}",
                self.tie_epsilon
            )));
        }
        Ok(())
    }
}

/// Every intermediate of a unified score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub global_score: f64,
    pub pair_scores: Vec<f64>,
    /// Absent for single-sentence discourses.
    pub local_score: Option<f64>,
    pub lambda: f64,
    pub final_score: f64,
}

pub fn global_score<S: ScorerBackend + ?Sized>(
    backend: &S,
    discourse: &Discourse,
) -> Result<f64, ScoringError> {
    Ok(checked_score(backend, discourse)?)
}

/// Scores each adjacent sentence pair; the result has `n - 1` entries.
pub fn local_scores<S: ScorerBackend + ?Sized>(
    backend: &S,
    discourse: &Discourse,
) -> Result<Vec<f64>, ScoringError> {
    (0..discourse.len().saturating_sub(1))
        .map(|i| {
            let pair = discourse
                .adjacent_pair(i)
                .expect("index below n - 1 always has a successor");
            Ok(checked_score(backend, &pair)?)
        })
        .collect()
}

pub fn unified_score<S: ScorerBackend + ?Sized>(
    backend: &S,
    discourse: &Discourse,
    config: &UnifiedScoringConfig,
) -> Result<ScoreBreakdown, ScoringError> {
    config.validate()?;
    let global = global_score(backend, discourse)?;
    let pair_scores = local_scores(backend, discourse)?;
    let local = (!pair_scores.is_empty())
        .then(|| pair_scores.iter().sum::<f64>() / pair_scores.len() as f64);
    let final_score = match local {
        Some(l) => (1.0 - config.lambda) * global + config.lambda * l,
        None => global,
    };
    Ok(ScoreBreakdown {
        global_score: global,
        pair_scores,
        local_score: local,
        lambda: config.lambda,
        final_score,
    })
}

/// Outcome of comparing two candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    A,
    B,
    Tie,
}

impl Verdict {
    /// The verdict for the same pair with arguments swapped.
    pub fn swapped(self) -> Self {
        match self {
            Self::A => Self::B,
            Self::B => Self::A,
            Self::Tie => Self::Tie,
        }
    }
}

/// `A` iff `a > b + epsilon`, `B` iff `b > a + epsilon`, `Tie` otherwise.
pub fn compare_scores(a: f64, b: f64, tie_epsilon: f64) -> Verdict {
    if a > b + tie_epsilon {
        Verdict::A
    } else if b > a + tie_epsilon {
        Verdict::B
    } else {
        Verdict::Tie
    }
}

pub fn pairwise_rank<S: ScorerBackend + ?Sized>(
    backend: &S,
    a: &Discourse,
    b: &Discourse,
    config: &UnifiedScoringConfig,
) -> Result<Verdict, ScoringError> {
    let sa = unified_score(backend, a, config)?;
    let sb = unified_score(backend, b, config)?;
    Ok(compare_scores(sa.final_score, sb.final_score, config.tie_epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn disc(sents: &[&str]) -> Discourse {
        Discourse::new(sents.iter().map(|s| s.to_string()).collect(), "t").unwrap()
    }

    /// Looks scores up by the joined sentence text.
    struct TableScorer(HashMap<String, f64>);

    impl ScorerBackend for TableScorer {
        fn score(&self, d: &Discourse) -> Result<f64, BackendError> {
            self.0
                .get(&d.sentences().join(" "))
                .copied()
                .ok_or_else(|| BackendError::UnknownDiscourse(d.sentences().join(" ")))
        }
        fn identity(&self) -> String {
            "table".into()
        }
    }

    #[test]
    fn constant_global_score() {
        assert_eq!(global_score(&ConstantScorer(0.7), &disc(&["A.", "B."])).unwrap(), 0.7);
    }

    #[test]
    fn out_of_range_is_backend_error() {
        let err = global_score(&ConstantScorer(1.2), &disc(&["A."])).unwrap_err();
        assert_eq!(err, ScoringError::Backend(BackendError::OutOfRange(1.2)));
        assert!(global_score(&ConstantScorer(f64::NAN), &disc(&["A."])).is_err());
    }

    #[test]
    fn local_scores_lengths() {
        let c = ConstantScorer(0.4);
        assert_eq!(local_scores(&c, &disc(&["A.", "B.", "C."])).unwrap(), vec![0.4, 0.4]);
        assert_eq!(local_scores(&c, &disc(&["A.", "B."])).unwrap().len(), 1);
        assert!(local_scores(&c, &disc(&["A."])).unwrap().is_empty());
    }

    #[test]
    fn worked_interpolation() {
        // global 0.8, pairs [0.6, 1.0] -> local 0.8, final 0.8 at lambda 0.5
        let t = TableScorer(HashMap::from([
            ("A. B. C.".to_string(), 0.8),
            ("A. B.".to_string(), 0.6),
            ("B. C.".to_string(), 1.0),
        ]));
        let d = disc(&["A.", "B.", "C."]);
        let b = unified_score(&t, &d, &UnifiedScoringConfig::default()).unwrap();
        assert_eq!(b.pair_scores, vec![0.6, 1.0]);
        assert!((b.local_score.unwrap() - 0.8).abs() < 1e-12);
        assert!((b.final_score - 0.8).abs() < 1e-12);

        let g = unified_score(&t, &d, &UnifiedScoringConfig::with_lambda(0.0)).unwrap();
        assert_eq!(g.final_score, 0.8);
        let l = unified_score(&t, &d, &UnifiedScoringConfig::with_lambda(1.0)).unwrap();
        assert_eq!(l.final_score, l.local_score.unwrap());
    }

    #[test]
    fn single_sentence_uses_global_only() {
        let b = unified_score(&ConstantScorer(0.3), &disc(&["Only."]), &UnifiedScoringConfig::default())
            .unwrap();
        assert_eq!(b.local_score, None);
        assert_eq!(b.final_score, 0.3);
    }

    #[test]
    fn lambda_outside_unit_interval_rejected() {
        let r = unified_score(&ConstantScorer(0.3), &disc(&["A."]), &UnifiedScoringConfig::with_lambda(1.5));
        assert!(matches!(r, Err(ScoringError::InvalidConfig(_))));
    }

    #[test]
    fn ranking_verdicts() {
        assert_eq!(compare_scores(0.9, 0.3, 1e-9), Verdict::A);
        assert_eq!(compare_scores(0.3, 0.9, 1e-9), Verdict::B);
        assert_eq!(compare_scores(0.5, 0.5, 1e-9), Verdict::Tie);
        assert_eq!(compare_scores(0.5, 0.5 + 1e-12, 1e-9), Verdict::Tie);
        let t = TableScorer(HashMap::from([("X.".to_string(), 0.9), ("Y.".to_string(), 0.3)]));
        let cfg = UnifiedScoringConfig::default();
        assert_eq!(pairwise_rank(&t, &disc(&["X."]), &disc(&["Y."]), &cfg).unwrap(), Verdict::A);
        assert_eq!(pairwise_rank(&t, &disc(&["Y."]), &disc(&["X."]), &cfg).unwrap(), Verdict::B);
    }
}
