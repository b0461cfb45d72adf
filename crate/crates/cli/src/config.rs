//! Run configuration: an optional TOML file overridden by command-line flags.

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, ValueEnum};
use coherence_core::augment::AugmentationConfig;
use coherence_core::backend::{RemoteClient, BACKEND_URL_ENV};
use coherence_core::corpus::read_dataset;
use coherence_core::scoring::{HeuristicScorer, OracleScorer};
use coherence_core::{RetryPolicy, ScorerBackend, UnifiedScoringConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Heuristic,
    Oracle,
    Remote,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendSection {
    pub kind: Option<BackendKind>,
    pub url: Option<String>,
    pub timeout_secs: Option<u64>,
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Echo,
    Remote,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorSection {
    pub kind: Option<GeneratorKind>,
    pub url: Option<String>,
    pub echo_sentence: Option<String>,
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub backend: BackendSection,
    pub generator: GeneratorSection,
    pub augment: Option<AugmentationConfig>,
    pub scoring: Option<UnifiedScoringConfig>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML configuration file; flags take precedence over its values
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Scorer used for scoring, ranking, meta-evaluation and filtering
    #[arg(long, value_enum, global = true)]
    pub backend: Option<BackendKind>,
    /// Base URL of the model service (falls back to $COHERENCE_BACKEND_URL)
    #[arg(long, global = true)]
    pub backend_url: Option<String>,
    /// Labelled dataset that feeds the oracle backend
    #[arg(long, global = true)]
    pub labels: Option<PathBuf>,
    #[arg(long, global = true)]
    pub timeout_secs: Option<u64>,
    /// Weight of the local score in the final score
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Filter threshold for local negatives
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Settings shared by every command after merging file and flags.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub seed: u64,
    pub workers: usize,
    pub backend: BackendKind,
    pub backend_url: Option<String>,
    pub timeout_secs: u64,
    pub labels: Option<PathBuf>,
    pub scoring: UnifiedScoringConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip)]
    pub file: FileConfig,
}

impl Resolved {
    pub fn new(args: &CommonArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let mut scoring = file.scoring.unwrap_or_default();
        if let Some(l) = args.lambda {
            scoring.lambda = l;
        }
        scoring.validate()?;
        let workers = args.workers.or(file.workers).unwrap_or(1);
        if workers == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        let backend_url = args
            .backend_url
            .clone()
            .or_else(|| file.backend.url.clone())
            .or_else(|| std::env::var(BACKEND_URL_ENV).ok().filter(|u| !u.is_empty()));
        Ok(Self {
            seed: args.seed.or(file.seed).unwrap_or(0),
            workers,
            backend: args.backend.or(file.backend.kind).unwrap_or(BackendKind::Heuristic),
            backend_url,
            timeout_secs: args.timeout_secs.or(file.backend.timeout_secs).unwrap_or(30),
            labels: args.labels.clone().or_else(|| file.backend.labels.clone()),
            scoring,
            delta: args.delta,
            file,
        })
    }

    pub fn remote(&self, url: Option<&str>, retry: RetryPolicy) -> Result<RemoteClient, CliError> {
        let url = url.or(self.backend_url.as_deref()).ok_or_else(|| {
            CliError::Usage(format!("remote backend needs --backend-url or ${BACKEND_URL_ENV}"))
        })?;
        Ok(RemoteClient::new(url, Duration::from_secs(self.timeout_secs), retry))
    }

    /// The configured scorer. `default_labels` feeds the oracle when `--labels` is absent.
    pub fn scorer(&self, default_labels: Option<&Path>) -> Result<Box<dyn ScorerBackend>, CliError> {
        Ok(match self.backend {
            BackendKind::Heuristic => Box::new(HeuristicScorer),
            BackendKind::Oracle => {
                let path = self.labels.as_deref().or(default_labels).ok_or_else(|| {
                    CliError::Usage("oracle backend needs --labels <dataset.jsonl>".into())
                })?;
                Box::new(OracleScorer::from_samples(&read_dataset(path)?))
            }
            BackendKind::Remote => Box::new(self.remote(None, RetryPolicy::default())?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_config_parses() {
        let text = r#"
seed = 13
workers = 4

[backend]
kind = "remote"
url = "http://localhost:8080"
timeout_secs = 30
labels = "build/dataset.jsonl"

[generator]
kind = "echo"
echo_sentence = "Nothing happened."

[augment]
min_sentences = 2
max_sentences = 5
filter_threshold = 0.5
global_fraction = 0.25
ngram_order = 2
local_strategy = "rule"
max_new_tokens = 64
temperature = 0.7
retry = { max_retries = 2, initial_backoff_ms = 100, multiplier = 2.0 }

[scoring]
lambda = 0.5
tie_epsilon = 1e-9
"#;
        let c: FileConfig = toml::from_str(text).unwrap();
        assert_eq!(c.backend.kind, Some(BackendKind::Remote));
        assert_eq!(c.augment.unwrap().local_strategy, coherence_core::augment::LocalStrategy::Rule);
        assert!(toml::from_str::<FileConfig>("[augment]\nfilter = 1\n").is_err());
        assert!(toml::from_str::<FileConfig>("[scoring]\nlamda = 1\n").is_err());
    }
}
