//! Masked-sentence substitution: mask selection, context truncation, generation and
//! coherence filtering.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AugmentError, LocalStrategy};
use crate::backend::{GenerationRequest, GeneratorBackend, MaskSide, RetryPolicy};
use crate::corpus::Discourse;
use crate::scoring::{checked_score, ScorerBackend};
use crate::seed::sha256_hex;
use crate::text::collapse_whitespace;

/// Draws the 1-based mask position uniformly from `2..=n-1`.
pub fn select_mask_index<R: Rng + ?Sized>(
    discourse: &Discourse,
    rng: &mut R,
) -> Result<usize, AugmentError> {
    let n = discourse.len();
    if n < 3 {
        return Err(AugmentError::NoInterior { n });
    }
    Ok(rng.gen_range(2u64..=(n as u64 - 1)) as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideKept {
    Prefix,
    Suffix,
    Both,
}

/// The leftover discourse around a masked position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedContext {
    pub sentences_before: Vec<String>,
    pub sentences_after: Vec<String>,
    pub side_kept: SideKept,
    /// 1-based position of the mask in the source discourse.
    pub mask_index: usize,
}

fn check_interior(discourse: &Discourse, k: usize) -> Result<(), AugmentError> {
    let n = discourse.len();
    if n < 3 {
        return Err(AugmentError::NoInterior { n });
    }
    if !(1 < k && k < n) {
        return Err(AugmentError::InvalidInput(format!(
            "mask index {k} is not interior to a {n}-sentence discourse"
        )));
    }
    Ok(())
}

impl MaskedContext {
    /// Untruncated context: both sides of the mask are kept.
    pub fn full(discourse: &Discourse, k: usize) -> Result<Self, AugmentError> {
        check_interior(discourse, k)?;
        let s = discourse.sentences();
        Ok(Self {
            sentences_before: s[..k - 1].to_vec(),
            sentences_after: s[k..].to_vec(),
            side_kept: SideKept::Both,
            mask_index: k,
        })
    }

    /// Number of context slots including the mask.
    pub fn len_with_mask(&self) -> usize {
        self.sentences_before.len() + self.sentences_after.len() + 1
    }

    /// Wire request for the generator. Only truncated contexts can be expressed.
    pub fn to_request(&self, settings: &GenerationSettings) -> Result<GenerationRequest, AugmentError> {
        let (context_sentences, mask_side) = match self.side_kept {
            SideKept::Prefix => (self.sentences_before.clone(), MaskSide::PrefixKept),
            SideKept::Suffix => (self.sentences_after.clone(), MaskSide::SuffixKept),
            SideKept::Both => {
                return Err(AugmentError::InvalidInput(
                    "the generation protocol only carries one-sided contexts".into(),
                ))
            }
        };
        Ok(GenerationRequest {
            context_sentences,
            mask_side,
            max_new_tokens: settings.max_new_tokens,
            temperature: settings.temperature,
        })
    }

    /// SHA-256 over the side and the kept sentences, hex encoded.
    pub fn context_hash(&self) -> String {
        let mut buf = String::new();
        buf.push_str(match self.side_kept {
            SideKept::Prefix => "prefix",
            SideKept::Suffix => "suffix",
            SideKept::Both => "both",
        });
        for s in self.sentences_before.iter().chain(["[mask]".to_string()].iter()).chain(&self.sentences_after) {
            buf.push('\n');
            buf.push_str(s);
        }
        sha256_hex(buf.as_bytes())
    }
}

/// Keeps only the context before the mask or only the context after it, with equal
/// probability.
pub fn truncate_context<R: Rng + ?Sized>(
    discourse: &Discourse,
    k: usize,
    rng: &mut R,
) -> Result<MaskedContext, AugmentError> {
    let mut ctx = MaskedContext::full(discourse, k)?;
    if rng.gen_bool(0.5) {
        ctx.sentences_after.clear();
        ctx.side_kept = SideKept::Prefix;
    } else {
        ctx.sentences_before.clear();
        ctx.side_kept = SideKept::Suffix;
    }
    Ok(ctx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationSettings {
    pub max_new_tokens: u32,
    pub temperature: f64,
    pub retry: RetryPolicy,
}

impl Default for GenerationSettings {
    fn default() -> Self {
        Self {
            max_new_tokens: 64,
            temperature: 0.7,
            retry: RetryPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExchangeStatus {
    Generated,
    Kept,
    Filtered,
    Failed,
    Empty,
    Identical,
}

/// Audit record of one generator call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationExchange {
    pub origin_id: String,
    pub mask_index: usize,
    pub context_hash: String,
    pub side: SideKept,
    pub substitute: Option<String>,
    pub model_id: Option<String>,
    pub filter_score: Option<f64>,
    pub status: ExchangeStatus,
    pub error: Option<String>,
}

/// Asks the generator for a substitute of the masked sentence.
///
/// Transport failures are retried per `settings.retry`; the final failure is returned
/// as a backend error. A blank generation is [`AugmentError::EmptyGeneration`].
/// The returned exchange carries the normalised substitute.
pub fn generate_substitute<G: GeneratorBackend + ?Sized>(
    ctx: &MaskedContext,
    origin_id: &str,
    backend: &G,
    settings: &GenerationSettings,
) -> Result<GenerationExchange, AugmentError> {
    let request = ctx.to_request(settings)?;
    let response = settings.retry.run(|_| backend.generate(&request))?;
    let substitute = collapse_whitespace(&response.substitute);
    if substitute.is_empty() {
        return Err(AugmentError::EmptyGeneration);
    }
    Ok(GenerationExchange {
        origin_id: origin_id.to_owned(),
        mask_index: ctx.mask_index,
        context_hash: ctx.context_hash(),
        side: ctx.side_kept,
        substitute: Some(substitute),
        model_id: Some(response.model_id),
        filter_score: None,
        status: ExchangeStatus::Generated,
        error: None,
    })
}

/// A coherent discourse and a locally corrupted copy of it.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidatePair {
    pub positive: Discourse,
    pub negative: Discourse,
    pub mask_index: usize,
    pub substitute: String,
    pub filter_score: Option<f64>,
    pub strategy: LocalStrategy,
}

impl CandidatePair {
    /// Replaces sentence `k` of `positive`; fails if the substitute equals the original.
    pub fn new(
        positive: Discourse,
        k: usize,
        substitute: String,
        strategy: LocalStrategy,
    ) -> Result<Self, AugmentError> {
        check_interior(&positive, k)?;
        if positive.sentence(k).map(str::trim) == Some(substitute.trim()) {
            return Err(AugmentError::InvalidInput(format!(
                "substitute for position {k} is identical to the original sentence"
            )));
        }
        let negative = positive.with_replaced(k, substitute.clone())?;
        Ok(Self {
            positive,
            negative,
            mask_index: k,
            substitute,
            filter_score: None,
            strategy,
        })
    }
}

/// Records the filter score of every negative. Pairs whose scoring fails are dropped
/// with a warning.
pub fn score_candidates<S: ScorerBackend + ?Sized>(
    pairs: Vec<CandidatePair>,
    scorer: &S,
) -> Vec<CandidatePair> {
    pairs
        .into_iter()
        .filter_map(|mut p| match checked_score(scorer, &p.negative) {
            Ok(v) => {
                p.filter_score = Some(v);
                Some(p)
            }
            Err(e) => {
                tracing::warn!(origin = p.positive.origin_id(), error = %e, "dropping candidate: filter scoring failed");
                None
            }
        })
        .collect()
}

/// Keeps pairs whose recorded score is at least `threshold`; unscored pairs are dropped.
pub fn apply_threshold(pairs: &[CandidatePair], threshold: f64) -> Vec<CandidatePair> {
    pairs
        .iter()
        .filter(|p| p.filter_score.is_some_and(|s| s >= threshold))
        .cloned()
        .collect()
}

/// Scores every candidate with `scorer` and keeps those scoring at least `threshold`.
pub fn coherence_filter<S: ScorerBackend + ?Sized>(
    pairs: Vec<CandidatePair>,
    scorer: &S,
    threshold: f64,
) -> Vec<CandidatePair> {
    apply_threshold(&score_candidates(pairs, scorer), threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{BackendError, EchoGenerator, GenerationResponse};
    use crate::scoring::ConstantScorer;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::atomic::{AtomicU32, Ordering};

    fn disc(sents: &[&str]) -> Discourse {
        Discourse::new(sents.iter().map(|s| s.to_string()).collect(), "l").unwrap()
    }

    #[test]
    fn mask_index_three_sentences() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..20 {
            assert_eq!(select_mask_index(&disc(&["a", "b", "c"]), &mut rng).unwrap(), 2);
        }
    }

    #[test]
    fn mask_index_requires_interior() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(select_mask_index(&disc(&["a", "b"]), &mut rng), Err(AugmentError::NoInterior { n: 2 })));
    }

    #[test]
    fn truncation_sides() {
        let d = disc(&["s1", "s2", "s3"]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut seen_prefix = false;
        let mut seen_suffix = false;
        for _ in 0..50 {
            let ctx = truncate_context(&d, 2, &mut rng).unwrap();
            match ctx.side_kept {
                SideKept::Prefix => {
                    seen_prefix = true;
                    assert_eq!(ctx.sentences_before, ["s1"]);
                    assert!(ctx.sentences_after.is_empty());
                }
                SideKept::Suffix => {
                    seen_suffix = true;
                    assert!(ctx.sentences_before.is_empty());
                    assert_eq!(ctx.sentences_after, ["s3"]);
                }
                SideKept::Both => unreachable!(),
            }
        }
        assert!(seen_prefix && seen_suffix);
    }

    #[test]
    fn truncation_rejects_edges() {
        let d = disc(&["s1", "s2", "s3"]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(truncate_context(&d, 1, &mut rng).is_err());
        assert!(truncate_context(&d, 3, &mut rng).is_err());
    }

    #[test]
    fn full_context_cannot_go_on_the_wire() {
        let ctx = MaskedContext::full(&disc(&["s1", "s2", "s3"]), 2).unwrap();
        assert_eq!(ctx.len_with_mask(), 3);
        assert!(ctx.to_request(&GenerationSettings::default()).is_err());
    }

    #[test]
    fn echo_generation() {
        let ctx = truncate_context(&disc(&["s1", "s2", "s3"]), 2, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let ex = generate_substitute(&ctx, "l", &EchoGenerator::new("  Fixed   one. "), &GenerationSettings::default()).unwrap();
        assert_eq!(ex.substitute.as_deref(), Some("Fixed one."));
        assert_eq!(ex.model_id.as_deref(), Some("echo"));
        assert_eq!(ex.context_hash.len(), 64);
    }

    struct Flaky {
        calls: AtomicU32,
        fail_first: u32,
        answer: &'static str,
    }

    impl GeneratorBackend for Flaky {
        fn generate(&self, _r: &GenerationRequest) -> Result<GenerationResponse, BackendError> {
            let n = self.calls.fetch_add(1, Ordering::SeqCst);
            if n < self.fail_first {
                Err(BackendError::Unreachable("down".into()))
            } else {
                Ok(GenerationResponse {
                    substitute: self.answer.into(),
                    model_id: "flaky".into(),
                })
            }
        }
        fn identity(&self) -> String {
            "flaky".into()
        }
    }

    fn settings(retries: u32) -> GenerationSettings {
        GenerationSettings {
            retry: RetryPolicy {
                max_retries: retries,
                initial_backoff_ms: 0,
                multiplier: 1.0,
            },
            ..GenerationSettings::default()
        }
    }

    #[test]
    fn unreachable_backend_fails_after_retries() {
        let g = Flaky {
            calls: AtomicU32::new(0),
            fail_first: u32::MAX,
            answer: "x",
        };
        let ctx = truncate_context(&disc(&["s1", "s2", "s3"]), 2, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let r = generate_substitute(&ctx, "l", &g, &settings(3));
        assert!(matches!(r, Err(AugmentError::Backend(BackendError::Unreachable(_)))));
        assert_eq!(g.calls.load(Ordering::SeqCst), 4);
    }

    #[test]
    fn transient_failure_recovers_and_empty_is_reported() {
        let ctx = truncate_context(&disc(&["s1", "s2", "s3"]), 2, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let g = Flaky {
            calls: AtomicU32::new(0),
            fail_first: 1,
            answer: "New.",
        };
        assert!(generate_substitute(&ctx, "l", &g, &settings(1)).is_ok());
        let g = Flaky {
            calls: AtomicU32::new(0),
            fail_first: 0,
            answer: "   ",
        };
        assert!(matches!(generate_substitute(&ctx, "l", &g, &settings(1)), Err(AugmentError::EmptyGeneration)));
    }

    fn scored(score: f64) -> CandidatePair {
        let mut p = CandidatePair::new(disc(&["a", "b", "c"]), 2, "z".into(), LocalStrategy::Generative).unwrap();
        p.filter_score = Some(score);
        p
    }

    #[test]
    fn threshold_keeps_boundary() {
        let pairs = vec![scored(0.3), scored(0.5), scored(0.7)];
        let kept = apply_threshold(&pairs, 0.5);
        assert_eq!(kept.iter().map(|p| p.filter_score.unwrap()).collect::<Vec<_>>(), vec![0.5, 0.7]);
        assert_eq!(apply_threshold(&pairs, 0.0).len(), 3);
    }

    #[test]
    fn filter_records_scores_and_drops_failures() {
        let pairs = vec![scored(0.0), scored(0.0)];
        let kept = coherence_filter(pairs.clone(), &ConstantScorer(0.6), 0.5);
        assert_eq!(kept.len(), 2);
        assert!(kept.iter().all(|p| p.filter_score == Some(0.6)));
        assert!(coherence_filter(pairs, &ConstantScorer(2.0), 0.0).is_empty());
    }

    #[test]
    fn identical_substitute_rejected() {
        assert!(CandidatePair::new(disc(&["a", "b", "c"]), 2, " b ".into(), LocalStrategy::Rule).is_err());
    }
}
