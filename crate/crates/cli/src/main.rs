//! `coherence`: build incoherent-negative datasets, score and rank discourses, and
//! meta-evaluate scorers against human ratings.

mod commands;
mod config;
mod error;
mod input;
mod output;

use std::io::IsTerminal;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tracing_subscriber::EnvFilter;

use commands::{augment, metaeval, rank, score, stats};
use config::{CommonArgs, Resolved};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "coherence", version, about = "Discourse coherence datasets, scoring and meta-evaluation")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a labelled dataset of coherent discourses and incoherent negatives
    Augment(augment::AugmentArgs),
    /// Score discourses with the unified global + local score
    Score(score::ScoreArgs),
    /// Pick the more coherent side of each pair and report accuracy
    Rank(rank::RankArgs),
    /// Correlate scores with human ratings
    MetaEval(metaeval::MetaEvalArgs),
    /// Summarise a dataset file
    DatasetStats(stats::StatsArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = Resolved::new(&cli.common)?;
    let out = cli.common.out.clone();
    match &cli.command {
        Command::Augment(a) => augment::run(&common, a, out),
        Command::Score(a) => score::run(&common, a, out),
        Command::Rank(a) => rank::run(&common, a, out),
        Command::MetaEval(a) => metaeval::run(&common, a, out),
        Command::DatasetStats(a) => stats::run(&common, a, out),
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("warn")))
        .with_writer(std::io::stderr)
        .with_ansi(std::io::stderr().is_terminal())
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
