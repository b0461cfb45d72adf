//! Discourse coherence toolkit.
//!
//! The crate is split along the pipeline:
//!
//! - [`corpus`]: documents, sentence segmentation, leading-sentence sampling and the
//!   line-delimited dataset format.
//! - [`augment`]: incoherent negative construction (sentence shuffling, masked-sentence
//!   substitution through a generator, n-gram rule baseline), coherence filtering and
//!   dataset assembly.
//! - [`scoring`]: the scorer backend contract, unified global + local scoring and
//!   pairwise ranking, plus the hermetic heuristic, constant and oracle scorers.
//! - [`metaeval`]: Pearson / Spearman / Kendall tau-b, sample- and dataset-level
//!   correlation against human ratings, ranking accuracy and length buckets.
//! - [`backend`]: shared backend error type, retry policy and the HTTP client for a
//!   remote model service.

pub mod augment;
pub mod backend;
pub mod corpus;
pub mod metaeval;
pub mod scoring;
mod seed;
mod text;

pub use augment::{AugmentError, AugmentationConfig, BuildReport};
pub use backend::{BackendError, GeneratorBackend, RetryPolicy};
pub use corpus::{CorpusError, Discourse, Document, Label, LabeledSample, Provenance, Source};
pub use metaeval::{CorrelationReport, MetaEvalError, RatingMatrix};
pub use scoring::{ScoreBreakdown, ScorerBackend, ScoringError, UnifiedScoringConfig, Verdict};

pub use seed::derive_seed;
