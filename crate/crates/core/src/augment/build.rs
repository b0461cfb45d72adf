//! Dataset assembly.

use std::collections::HashSet;
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::local::{CandidatePair, ExchangeStatus, GenerationExchange};
use super::rule::NgramPool;
use super::{
    generate_substitute, global_shuffle, select_mask_index, truncate_context, AugmentError,
    AugmentationConfig, LocalStrategy,
};
use crate::backend::GeneratorBackend;
use crate::corpus::{
    sample_leading, CorpusError, Discourse, Document, Label, LabeledSample, Provenance,
};
use crate::scoring::{checked_score, ScorerBackend};
use crate::seed::rng_for;

/// Dataset size implied by the pairing structure: every negative brings its positive.
pub fn counting_total(n_neg_global: usize, n_local_kept: usize) -> usize {
    2 * (n_neg_global + n_local_kept)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildCounts {
    pub n_sources: usize,
    pub n_pos_global: usize,
    pub n_neg_global: usize,
    pub n_local_candidates: usize,
    pub n_local_generated: usize,
    pub n_local_kept: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildReport {
    pub counts: BuildCounts,
    pub filter_threshold: f64,
    pub seed: u64,
    pub local_strategy: LocalStrategy,
    pub generator: String,
    pub filter_scorer: String,
    pub wall_time_ms: u64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub samples: Vec<LabeledSample>,
    pub report: BuildReport,
    /// One record per local candidate that reached the generator.
    pub exchanges: Vec<GenerationExchange>,
}

/// Samples a 2..=5 (per config) leading-sentence discourse from every document.
///
/// Each document draws from its own seeded stream, so the result does not depend on
/// document order. Documents that are too short are skipped and returned by id.
pub fn sample_sources(
    docs: &[Document],
    config: &AugmentationConfig,
) -> Result<(Vec<Discourse>, Vec<String>), AugmentError> {
    config.validate()?;
    let mut sources = Vec::with_capacity(docs.len());
    let mut skipped = Vec::new();
    for doc in docs {
        let mut rng = rng_for(config.seed, &[b"leading", doc.id.as_bytes()]);
        match sample_leading(doc, &mut rng, config.min_sentences, config.max_sentences) {
            Ok(d) => sources.push(d),
            Err(CorpusError::TooShort { .. }) => {
                tracing::warn!(id = %doc.id, "document too short, skipped");
                skipped.push(doc.id.clone());
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok((sources, skipped))
}

enum Role {
    Unused,
    Global,
    Local,
}

fn assign_roles(sources: &[Discourse], config: &AugmentationConfig) -> Result<Vec<Role>, AugmentError> {
    let n = sources.len();
    if n == 0 {
        return Err(AugmentError::InsufficientData {
            what: "dataset build".into(),
            needed: 1,
            available: 0,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_for(config.seed, &[b"partition"]));
    let eligible: Vec<usize> = order.iter().copied().filter(|&i| sources[i].len() >= 3).collect();
    let mut roles: Vec<Role> = (0..n).map(|_| Role::Unused).collect();

    match (config.global_count, config.local_count) {
        (Some(g), Some(l)) => {
            if l > eligible.len() {
                return Err(AugmentError::InsufficientData {
                    what: "local candidates (discourses with >= 3 sentences)".into(),
                    needed: l,
                    available: eligible.len(),
                });
            }
            if g + l > n {
                return Err(AugmentError::InsufficientData {
                    what: "global + local sources".into(),
                    needed: g + l,
                    available: n,
                });
            }
            for &i in &eligible[..l] {
                roles[i] = Role::Local;
            }
            let mut taken = 0;
            for &i in &order {
                if taken == g {
                    break;
                }
                if matches!(roles[i], Role::Unused) {
                    roles[i] = Role::Global;
                    taken += 1;
                }
            }
        }
        _ => {
            let target = (config.global_fraction * n as f64).round() as usize;
            let mut n_global = 0;
            for (i, d) in sources.iter().enumerate() {
                if d.len() < 3 {
                    roles[i] = Role::Global;
                    n_global += 1;
                }
            }
            for &i in &eligible {
                if n_global < target {
                    roles[i] = Role::Global;
                    n_global += 1;
                } else {
                    roles[i] = Role::Local;
                }
            }
        }
    }
    Ok(roles)
}

enum LocalOutcome {
    Pair(CandidatePair, Option<GenerationExchange>),
    Skipped(Option<GenerationExchange>),
}

fn failed_exchange(origin: &str, k: usize, ctx_hash: String, side: super::SideKept, status: ExchangeStatus, error: String) -> GenerationExchange {
    GenerationExchange {
        origin_id: origin.to_owned(),
        mask_index: k,
        context_hash: ctx_hash,
        side,
        substitute: None,
        model_id: None,
        filter_score: None,
        status,
        error: Some(error),
    }
}

fn local_candidate<G: GeneratorBackend + ?Sized>(
    source: &Discourse,
    config: &AugmentationConfig,
    generator: &G,
    pool: Option<&NgramPool>,
) -> Result<LocalOutcome, AugmentError> {
    let origin = source.origin_id();
    let k = select_mask_index(source, &mut rng_for(config.seed, &[b"mask", origin.as_bytes()]))?;
    let k_bytes = (k as u64).to_le_bytes();
    let ctx = truncate_context(
        source,
        k,
        &mut rng_for(config.seed, &[b"truncate", origin.as_bytes(), &k_bytes]),
    )?;

    let (substitute, mut exchange) = match config.local_strategy {
        LocalStrategy::Generative => {
            match generate_substitute(&ctx, origin, generator, &config.generation_settings()) {
                Ok(ex) => (ex.substitute.clone().unwrap_or_default(), Some(ex)),
                Err(e @ (AugmentError::Backend(_) | AugmentError::EmptyGeneration)) => {
                    tracing::warn!(origin, error = %e, "dropping local candidate");
                    let status = if matches!(e, AugmentError::EmptyGeneration) {
                        ExchangeStatus::Empty
                    } else {
                        ExchangeStatus::Failed
                    };
                    return Ok(LocalOutcome::Skipped(Some(failed_exchange(
                        origin,
                        k,
                        ctx.context_hash(),
                        ctx.side_kept,
                        status,
                        e.to_string(),
                    ))));
                }
                Err(e) => return Err(e),
            }
        }
        LocalStrategy::Rule => {
            let pool = pool.expect("rule strategy always builds a pool");
            let target = source.sentence(k).expect("interior index");
            match pool.best(target, origin) {
                Some((s, _)) => (s.to_owned(), None),
                None => {
                    tracing::warn!(origin, "no pool sentence outside the source origin");
                    return Ok(LocalOutcome::Skipped(None));
                }
            }
        }
    };

    match CandidatePair::new(source.clone(), k, substitute, config.local_strategy) {
        Ok(pair) => Ok(LocalOutcome::Pair(pair, exchange)),
        Err(AugmentError::InvalidInput(msg)) => {
            tracing::warn!(origin, "dropping local candidate: {msg}");
            if let Some(ex) = exchange.as_mut() {
                ex.status = ExchangeStatus::Identical;
            }
            Ok(LocalOutcome::Skipped(exchange))
        }
        Err(e) => Err(e),
    }
}

fn pool_for(workers: usize) -> Result<rayon::ThreadPool, AugmentError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| AugmentError::InvalidConfig(format!("cannot start {workers} workers: {e}")))
}

/// Builds the labelled dataset from coherent source discourses.
///
/// Sources are split into a global group (shuffled negatives) and a local group
/// (substituted negatives, kept only when the filter score reaches the threshold).
/// Two-sentence sources are always global. With `global_count` and `local_count` set,
/// exactly that many sources are used per group; otherwise `global_fraction` of all
/// sources go to the global group and the rest to the local group.
///
/// All randomness is derived from `(seed, origin id, mask position)`, and output is
/// ordered by source index, so the result is identical for any worker count.
pub fn build_dataset<G, S>(
    config: &AugmentationConfig,
    sources: &[Discourse],
    generator: &G,
    filter: &S,
) -> Result<BuildOutput, AugmentError>
where
    G: GeneratorBackend + ?Sized,
    S: ScorerBackend + ?Sized,
{
    let started = Instant::now();
    config.validate()?;
    let mut seen = HashSet::new();
    for s in sources {
        if !seen.insert(s.origin_id()) {
            return Err(AugmentError::InvalidInput(format!(
                "duplicate source origin id {}",
                s.origin_id()
            )));
        }
    }
    let roles = assign_roles(sources, config)?;
    let mut warnings = Vec::new();

    let global_neg: Vec<Option<Discourse>> = sources
        .iter()
        .zip(&roles)
        .map(|(s, r)| match r {
            Role::Global => {
                let mut rng = rng_for(config.seed, &[b"shuffle", s.origin_id().as_bytes()]);
                match global_shuffle(s, &mut rng) {
                    Ok(neg) => Ok(Some(neg)),
                    Err(AugmentError::Degenerate) => {
                        tracing::warn!(origin = s.origin_id(), "all sentences identical, no shuffle possible");
                        Ok(None)
                    }
                    Err(e) => Err(e),
                }
            }
            _ => Ok(None),
        })
        .collect::<Result<_, AugmentError>>()?;

    let local_idx: Vec<usize> = roles
        .iter()
        .enumerate()
        .filter_map(|(i, r)| matches!(r, Role::Local).then_some(i))
        .collect();
    let rule_pool = (config.local_strategy == LocalStrategy::Rule && !local_idx.is_empty())
        .then(|| NgramPool::new(sources, config.ngram_order));

    let gen_workers = if generator.supports_concurrency() { config.workers } else { 1 };
    let outcomes: Vec<LocalOutcome> = pool_for(gen_workers)?.install(|| {
        local_idx
            .par_iter()
            .map(|&i| local_candidate(&sources[i], config, generator, rule_pool.as_ref()))
            .collect::<Result<_, AugmentError>>()
    })?;

    let filter_workers = if filter.supports_concurrency() { config.workers } else { 1 };
    let scored: Vec<Option<f64>> = pool_for(filter_workers)?.install(|| {
        outcomes
            .par_iter()
            .map(|o| match o {
                LocalOutcome::Pair(p, _) => match checked_score(filter, &p.negative) {
                    Ok(v) => Some(v),
                    Err(e) => {
                        tracing::warn!(origin = p.positive.origin_id(), error = %e, "dropping candidate: filter scoring failed");
                        None
                    }
                },
                LocalOutcome::Skipped(_) => None,
            })
            .collect()
    });

    let mut exchanges = Vec::new();
    let mut local_kept: Vec<Option<CandidatePair>> = (0..sources.len()).map(|_| None).collect();
    let mut n_local_generated = 0;
    for ((outcome, score), &i) in outcomes.into_iter().zip(scored).zip(&local_idx) {
        match outcome {
            LocalOutcome::Pair(mut pair, exchange) => {
                n_local_generated += 1;
                pair.filter_score = score;
                let keep = score.is_some_and(|s| s >= config.filter_threshold);
                if let Some(mut ex) = exchange {
                    ex.filter_score = score;
                    ex.status = if keep { ExchangeStatus::Kept } else { ExchangeStatus::Filtered };
                    if score.is_none() {
                        ex.error = Some("filter scoring failed".into());
                    }
                    exchanges.push(ex);
                }
                if keep {
                    local_kept[i] = Some(pair);
                }
            }
            LocalOutcome::Skipped(exchange) => exchanges.extend(exchange),
        }
    }

    let mut samples = Vec::new();
    let mut counts = BuildCounts {
        n_sources: sources.len(),
        n_local_candidates: local_idx.len(),
        n_local_generated,
        ..BuildCounts::default()
    };
    for (i, source) in sources.iter().enumerate() {
        let origin = source.origin_id();
        let (negative, provenance, tag) = if let Some(neg) = global_neg[i].clone() {
            counts.n_pos_global += 1;
            counts.n_neg_global += 1;
            (neg, Provenance::GlobalShuffle, "global")
        } else if let Some(pair) = local_kept[i].take() {
            counts.n_local_kept += 1;
            let prov = match pair.strategy {
                LocalStrategy::Generative => Provenance::LocalGenerative,
                LocalStrategy::Rule => Provenance::LocalRule,
            };
            (pair.negative, prov, "local")
        } else {
            continue;
        };
        samples.push(LabeledSample {
            id: format!("{origin}:pos"),
            discourse: source.clone(),
            label: Label::Coherent,
            provenance: Provenance::Original,
            pair_id: origin.to_owned(),
        });
        samples.push(LabeledSample {
            id: format!("{origin}:neg:{tag}"),
            discourse: negative,
            label: Label::Incoherent,
            provenance,
            pair_id: origin.to_owned(),
        });
    }
    counts.total = samples.len();
    debug_assert_eq!(counts.total, counting_total(counts.n_neg_global, counts.n_local_kept));

    if counts.n_local_candidates > 0 && counts.n_local_kept == 0 {
        let msg = format!(
            "no local candidate survived (threshold {}); dataset holds global pairs only",
            config.filter_threshold
        );
        tracing::warn!("{msg}");
        warnings.push(msg);
    }

    let report = BuildReport {
        counts,
        filter_threshold: config.filter_threshold,
        seed: config.seed,
        local_strategy: config.local_strategy,
        generator: match config.local_strategy {
            LocalStrategy::Generative => generator.identity(),
            LocalStrategy::Rule => format!("rule:ngram-{}", config.ngram_order),
        },
        filter_scorer: filter.identity(),
        wall_time_ms: started.elapsed().as_millis() as u64,
        warnings,
    };
    Ok(BuildOutput {
        samples,
        report,
        exchanges,
    })
}
