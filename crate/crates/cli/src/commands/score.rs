use std::path::PathBuf;

use clap::Args;
use coherence_core::scoring::unified_score;
use coherence_core::ScoreBreakdown;
use serde::Serialize;

use crate::config::Resolved;
use crate::error::CliError;
use crate::input::{parse_discourse, read_text};
use crate::output::{ensure_dir, write_json, JsonLines, Report};

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// One discourse per line: JSON sentence list, {id, sentences|text}, or raw text; `-` for stdin
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Serialize)]
struct Record<'a> {
    line: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_sentences: Option<usize>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    breakdown: Option<ScoreBreakdown>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

#[derive(Serialize)]
struct Summary {
    n_lines: usize,
    n_scored: usize,
    n_failed: usize,
    scorer: String,
}

pub fn run(common: &Resolved, args: &ScoreArgs, out: Option<PathBuf>) -> Result<(), CliError> {
    let text = read_text(&args.input)?;
    let scorer = common.scorer(None)?;
    if let Some(dir) = &out {
        ensure_dir(dir)?;
    }
    let mut records = JsonLines::create(out.as_ref().map(|d| d.join("scores.jsonl")))?;
    let (mut total, mut failed) = (0, 0);
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        total += 1;
        let line_no = idx + 1;
        let result = parse_discourse(line, line_no).and_then(|(id, d)| {
            unified_score(scorer.as_ref(), &d, &common.scoring)
                .map(|b| (id.clone(), d.len(), b))
                .map_err(|e| e.to_string())
        });
        match result {
            Ok((id, n, b)) => records.write(&Record {
                line: line_no,
                id,
                n_sentences: Some(n),
                breakdown: Some(b),
                error: None,
            })?,
            Err(e) => {
                failed += 1;
                tracing::warn!(line = line_no, "{e}");
                records.write(&Record {
                    line: line_no,
                    id: None,
                    n_sentences: None,
                    breakdown: None,
                    error: Some(&e),
                })?;
            }
        }
    }
    records.finish()?;
    let summary = Summary {
        n_lines: total,
        n_scored: total - failed,
        n_failed: failed,
        scorer: scorer.identity(),
    };
    if let Some(dir) = &out {
        write_json(&dir.join("report.json"), &Report::new("score", common, summary))?;
    }
    if failed > 0 {
        return Err(CliError::Partial { failed, total, what: "lines" });
    }
    Ok(())
}
