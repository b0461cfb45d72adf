use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use coherence_core::metaeval::{
    dataset_level_report, length_bucket_report, read_ratings, read_scores, sample_level_report,
    score_matrix, write_scores, BucketReport, Coefficient,
};
use coherence_core::CorrelationReport;
use serde::Serialize;

use crate::config::Resolved;
use crate::error::CliError;
use crate::output::{ensure_dir, write_json, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelArg {
    Sample,
    Dataset,
    Both,
}

#[derive(Debug, Args)]
pub struct MetaEvalArgs {
    /// Human ratings: annotated summaries or {doc_id, system_id, sentences|text, human}
    #[arg(long)]
    pub ratings: PathBuf,
    /// Precomputed {doc_id, system_id, score} lines; the backend scores outputs otherwise
    #[arg(long)]
    pub scores: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    pub level: LevelArg,
    /// Add dataset-level correlations per output sentence count
    #[arg(long)]
    pub by_length: bool,
}

#[derive(Serialize)]
struct EffectiveConfig<'a> {
    #[serde(flatten)]
    common: &'a Resolved,
    ratings: &'a PathBuf,
    scores: Option<&'a PathBuf>,
    level: LevelArg,
    by_length: bool,
}

#[derive(Serialize)]
struct Body {
    scorer: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    sample: Option<CorrelationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dataset: Option<CorrelationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    length_buckets: Option<Vec<BucketReport>>,
}

fn cell(c: &Coefficient) -> String {
    c.value.map_or_else(|| "-".to_owned(), |v| format!("{v:.4}"))
}

fn row(table: &mut String, label: &str, r: &CorrelationReport) {
    let mean = r.mean().map_or_else(|| "-".to_owned(), |v| format!("{v:.4}"));
    let _ = writeln!(
        table,
        "{label:<10} {:>6} {:>7} {:>8} {:>8} {:>8} {:>8}",
        r.n_documents,
        r.n_cells,
        cell(&r.rho),
        cell(&r.r),
        cell(&r.tau),
        mean
    );
}

fn table(body: &Body) -> String {
    let mut t = format!(
        "{:<10} {:>6} {:>7} {:>8} {:>8} {:>8} {:>8}\n",
        "level", "docs", "cells", "rho", "r", "tau", "mean"
    );
    if let Some(r) = &body.sample {
        row(&mut t, "sample", r);
    }
    if let Some(r) = &body.dataset {
        row(&mut t, "dataset", r);
    }
    for b in body.length_buckets.iter().flatten() {
        row(&mut t, &format!("len={}", b.n_sentences), &b.report);
    }
    t
}

pub fn run(common: &Resolved, args: &MetaEvalArgs, out: Option<PathBuf>) -> Result<(), CliError> {
    let matrix = read_ratings(&args.ratings)?;
    if matrix.is_empty() {
        return Err(CliError::Usage(format!("no ratings in {}", args.ratings.display())));
    }
    let (scores, scorer) = match &args.scores {
        Some(p) => (read_scores(p)?, format!("file:{}", p.display())),
        None => {
            let backend = common.scorer(None)?;
            (score_matrix(&matrix, backend.as_ref(), &common.scoring)?, backend.identity())
        }
    };
    let want_sample = args.level != LevelArg::Dataset;
    let want_dataset = args.level != LevelArg::Sample;
    let body = Body {
        scorer,
        sample: want_sample.then(|| sample_level_report(&matrix, &scores)).transpose()?,
        dataset: want_dataset.then(|| dataset_level_report(&matrix, &scores)).transpose()?,
        length_buckets: args.by_length.then(|| length_bucket_report(&matrix, &scores)).transpose()?,
    };
    for s in body.sample.iter().flat_map(|r| &r.skipped_documents) {
        tracing::warn!(doc = %s.doc_id, "left out of sample-level mean: {}", s.reasons.join("; "));
    }
    let rendered = table(&body);
    print!("{rendered}");
    if let Some(dir) = &out {
        ensure_dir(dir)?;
        if args.scores.is_none() {
            write_scores(&scores, &dir.join("scores.jsonl"))?;
        }
        std::fs::write(dir.join("table.txt"), &rendered).map_err(|e| CliError::io(&dir.join("table.txt"), e))?;
        let effective = EffectiveConfig {
            common,
            ratings: &args.ratings,
            scores: args.scores.as_ref(),
            level: args.level,
            by_length: args.by_length,
        };
        write_json(&dir.join("report.json"), &Report::new("meta-eval", &effective, body))?;
    }
    Ok(())
}
