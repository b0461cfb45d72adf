use std::path::PathBuf;

use clap::Args;
use coherence_core::augment::{build_dataset, sample_sources, AugmentationConfig, LocalStrategy};
use coherence_core::backend::EchoGenerator;
use coherence_core::corpus::{read_documents, split_dataset, write_dataset};
use coherence_core::{derive_seed, GeneratorBackend, RetryPolicy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{BackendKind, GeneratorKind, Resolved};
use crate::error::CliError;
use crate::output::{ensure_dir, write_json, JsonLines, Report};

#[derive(Debug, Args)]
pub struct AugmentArgs {
    /// Directory of text files, or a JSONL file of {id, text, source}
    #[arg(long)]
    pub sources: PathBuf,
    #[arg(long, value_enum)]
    pub generator: Option<GeneratorKind>,
    /// Base URL of the generation service (defaults to the backend URL)
    #[arg(long)]
    pub generator_url: Option<String>,
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
    #[arg(long)]
    pub global_fraction: Option<f64>,
    /// Exact number of shuffled negatives; requires --local-count
    #[arg(long, requires = "local_count")]
    pub global_count: Option<usize>,
    /// Exact number of local candidates; requires --global-count
    #[arg(long, requires = "global_count")]
    pub local_count: Option<usize>,
    #[arg(long)]
    pub min_sentences: Option<usize>,
    #[arg(long)]
    pub max_sentences: Option<usize>,
    #[arg(long)]
    pub ngram_order: Option<usize>,
    /// Also write train.jsonl and valid.jsonl, holding out this share of samples
    #[arg(long)]
    pub valid_fraction: Option<f64>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum StrategyArg {
    Generative,
    Rule,
}

#[derive(Serialize)]
struct EffectiveConfig<'a> {
    #[serde(flatten)]
    common: &'a Resolved,
    sources: &'a PathBuf,
    generator: GeneratorKind,
    generator_url: Option<&'a str>,
    valid_fraction: Option<f64>,
    augment: &'a AugmentationConfig,
}

#[derive(Serialize)]
struct Body<'a> {
    build: &'a coherence_core::BuildReport,
    skipped_documents: &'a [String],
    files: Vec<String>,
}

pub fn run(common: &Resolved, args: &AugmentArgs, out: Option<PathBuf>) -> Result<(), CliError> {
    let out = out.ok_or_else(|| CliError::Usage("augment needs --out <dir>".into()))?;
    if !args.sources.exists() {
        return Err(CliError::Usage(format!("source path does not exist: {}", args.sources.display())));
    }
    let mut config = common.file.augment.clone().unwrap_or_default();
    config.seed = common.seed;
    config.workers = common.workers;
    if let Some(s) = args.strategy {
        config.local_strategy = match s {
            StrategyArg::Generative => LocalStrategy::Generative,
            StrategyArg::Rule => LocalStrategy::Rule,
        };
    }
    macro_rules! set {
        ($($field:ident),*) => { $(if let Some(v) = args.$field { config.$field = v; })* };
    }
    set!(global_fraction, min_sentences, max_sentences, ngram_order);
    if args.global_count.is_some() {
        config.global_count = args.global_count;
        config.local_count = args.local_count;
    }
    if let Some(d) = common.delta {
        config.filter_threshold = d;
    }
    config.validate()?;
    if let Some(f) = args.valid_fraction {
        if !(f > 0.0 && f < 1.0) {
            return Err(CliError::Usage(format!("--valid-fraction must lie in (0, 1), got {f}")));
        }
    }

    let generator_kind = args.generator.or(common.file.generator.kind).unwrap_or(GeneratorKind::Echo);
    let generator_url = args.generator_url.as_deref().or(common.file.generator.url.as_deref());
    let generator: Box<dyn GeneratorBackend> = match generator_kind {
        GeneratorKind::Echo => Box::new(match &common.file.generator.echo_sentence {
            Some(s) => EchoGenerator::new(s.clone()),
            None => EchoGenerator::default(),
        }),
        // retries are applied per candidate by the build
        GeneratorKind::Remote => Box::new(common.remote(generator_url, RetryPolicy::none())?),
    };
    if common.backend == BackendKind::Oracle {
        return Err(CliError::Usage("the oracle backend cannot filter unseen candidates; use heuristic or remote".into()));
    }
    let filter = common.scorer(None)?;

    let docs = read_documents(&args.sources)?;
    let (sources, skipped) = sample_sources(&docs, &config)?;
    let built = build_dataset(&config, &sources, generator.as_ref(), filter.as_ref())?;

    ensure_dir(&out)?;
    let mut files = vec!["dataset.jsonl".to_owned()];
    write_dataset(&built.samples, &out.join("dataset.jsonl"))?;
    if let Some(f) = args.valid_fraction {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[b"split"]));
        let (train, valid) = split_dataset(&built.samples, f, &mut rng)?;
        write_dataset(&train, &out.join("train.jsonl"))?;
        write_dataset(&valid, &out.join("valid.jsonl"))?;
        files.extend(["train.jsonl".to_owned(), "valid.jsonl".to_owned()]);
    }
    let mut ex = JsonLines::create(Some(out.join("exchanges.jsonl")))?;
    for e in &built.exchanges {
        ex.write(e)?;
    }
    ex.finish()?;
    files.push("exchanges.jsonl".into());

    let effective = EffectiveConfig {
        common,
        sources: &args.sources,
        generator: generator_kind,
        generator_url,
        valid_fraction: args.valid_fraction,
        augment: &config,
    };
    let body = Body {
        build: &built.report,
        skipped_documents: &skipped,
        files,
    };
    write_json(&out.join("report.json"), &Report::new("augment", &effective, body))?;

    let c = &built.report.counts;
    eprintln!(
        "{} samples ({} global + {} local pairs) from {} sources; written to {}",
        c.total,
        c.n_neg_global,
        c.n_local_kept,
        c.n_sources,
        out.display()
    );
    Ok(())
}
