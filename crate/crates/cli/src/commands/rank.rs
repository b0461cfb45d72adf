use std::path::PathBuf;

use clap::Args;
use coherence_core::corpus::read_dataset;
use coherence_core::metaeval::{pairs_from_dataset, read_pairs, RankingPair, RankingSummary};
use coherence_core::scoring::{compare_scores, unified_score};
use coherence_core::{ScorerBackend, Verdict};
use serde::Serialize;

use crate::config::Resolved;
use crate::error::CliError;
use crate::output::{ensure_dir, write_json, JsonLines, Report};

#[derive(Debug, Args)]
pub struct RankArgs {
    /// Pair file: {id, a, b, gold} or {id, coherent, incoherent} per line
    #[arg(long, conflicts_with = "dataset", required_unless_present = "dataset")]
    pub pairs: Option<PathBuf>,
    /// Labelled dataset; every negative is ranked against its positive
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Swap the two sides of every pair before ranking
    #[arg(long)]
    pub swap: bool,
}

#[derive(Serialize)]
struct Record<'a> {
    id: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gold: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    score_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    score_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct Summary {
    n_pairs: usize,
    n_ranked: usize,
    n_failed: usize,
    n_labelled: usize,
    correct: usize,
    ties: usize,
    incorrect: usize,
    accuracy: Option<f64>,
    scorer: String,
}

fn score_pair(scorer: &dyn ScorerBackend, p: &RankingPair, common: &Resolved) -> Result<(f64, f64), String> {
    let a = unified_score(scorer, &p.a, &common.scoring).map_err(|e| format!("side a: {e}"))?;
    let b = unified_score(scorer, &p.b, &common.scoring).map_err(|e| format!("side b: {e}"))?;
    Ok((a.final_score, b.final_score))
}

pub fn run(common: &Resolved, args: &RankArgs, out: Option<PathBuf>) -> Result<(), CliError> {
    let mut pairs = match (&args.pairs, &args.dataset) {
        (Some(p), _) => read_pairs(p)?,
        (None, Some(d)) => pairs_from_dataset(&read_dataset(d)?),
        (None, None) => unreachable!("clap requires one input"),
    };
    if pairs.is_empty() {
        return Err(CliError::Usage("no pairs to rank".into()));
    }
    if let Some(p) = pairs.iter().find(|p| p.gold == Some(Verdict::Tie)) {
        return Err(CliError::Usage(format!("pair {} has a tie as gold label", p.id)));
    }
    if args.swap {
        pairs = pairs.iter().map(RankingPair::swapped).collect();
    }
    let scorer = common.scorer(args.dataset.as_deref())?;
    if let Some(dir) = &out {
        ensure_dir(dir)?;
    }
    let mut records = JsonLines::create(out.as_ref().map(|d| d.join("verdicts.jsonl")))?;
    let mut outcomes = Vec::with_capacity(pairs.len());
    let mut failed = 0;
    for p in &pairs {
        match score_pair(scorer.as_ref(), p, common) {
            Ok((a, b)) => {
                let v = compare_scores(a, b, common.scoring.tie_epsilon);
                outcomes.push((p.gold, v));
                records.write(&Record { id: &p.id, verdict: Some(v), gold: p.gold, score_a: Some(a), score_b: Some(b), error: None })?;
            }
            Err(e) => {
                failed += 1;
                tracing::warn!(pair = %p.id, "{e}");
                records.write(&Record { id: &p.id, verdict: None, gold: p.gold, score_a: None, score_b: None, error: Some(e) })?;
            }
        }
    }
    records.finish()?;
    let t = RankingSummary::tally(&outcomes);
    let summary = Summary {
        n_pairs: pairs.len(),
        n_ranked: outcomes.len(),
        n_failed: failed,
        n_labelled: t.n_labelled,
        correct: t.correct,
        ties: t.ties,
        incorrect: t.incorrect,
        accuracy: t.accuracy,
        scorer: scorer.identity(),
    };
    match t.accuracy {
        Some(a) => eprintln!("accuracy {a:.4} over {} labelled pairs ({} ties)", t.n_labelled, t.ties),
        None => eprintln!("{} pairs ranked, none labelled", outcomes.len()),
    }
    if let Some(dir) = &out {
        write_json(&dir.join("summary.json"), &Report::new("rank", common, summary))?;
    }
    if failed > 0 {
        return Err(CliError::Partial { failed, total: pairs.len(), what: "pairs" });
    }
    Ok(())
}
