use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use coherence_core::corpus::read_dataset;
use coherence_core::{Label, Provenance};
use serde::Serialize;

use crate::config::Resolved;
use crate::error::CliError;
use crate::output::{ensure_dir, write_json, Report};

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub dataset: PathBuf,
}

#[derive(Serialize)]
struct Stats {
    n_samples: usize,
    n_pairs: usize,
    coherent: usize,
    incoherent: usize,
    by_provenance: BTreeMap<String, usize>,
    /// Sample count per sentence count.
    sentence_counts: BTreeMap<usize, usize>,
    mean_sentences: f64,
    mean_words_per_sentence: f64,
}

fn provenance_name(p: Provenance) -> String {
    serde_json::to_value(p).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

pub fn run(common: &Resolved, args: &StatsArgs, out: Option<PathBuf>) -> Result<(), CliError> {
    // read_dataset checks ids and pair links
    let samples = read_dataset(&args.dataset)?;
    let mut by_provenance = BTreeMap::new();
    let mut sentence_counts = BTreeMap::new();
    let (mut sentences, mut words) = (0usize, 0usize);
    for s in &samples {
        *by_provenance.entry(provenance_name(s.provenance)).or_insert(0) += 1;
        *sentence_counts.entry(s.discourse.len()).or_insert(0) += 1;
        sentences += s.discourse.len();
        words += s.discourse.sentences().iter().map(|x| x.split_whitespace().count()).sum::<usize>();
    }
    let coherent = samples.iter().filter(|s| s.label == Label::Coherent).count();
    let mut pair_ids: Vec<&str> = samples.iter().map(|s| s.pair_id.as_str()).collect();
    pair_ids.sort_unstable();
    pair_ids.dedup();
    let stats = Stats {
        n_samples: samples.len(),
        n_pairs: pair_ids.len(),
        coherent,
        incoherent: samples.len() - coherent,
        by_provenance,
        sentence_counts,
        mean_sentences: if samples.is_empty() { 0.0 } else { sentences as f64 / samples.len() as f64 },
        mean_words_per_sentence: if sentences == 0 { 0.0 } else { words as f64 / sentences as f64 },
    };
    println!("{}", serde_json::to_string_pretty(&stats).expect("stats serialize"));
    if let Some(dir) = &out {
        ensure_dir(dir)?;
        write_json(&dir.join("stats.json"), &Report::new("dataset-stats", common, stats))?;
    }
    Ok(())
}
