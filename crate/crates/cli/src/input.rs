use std::fs;
use std::io::{self, Read};
use std::path::Path;

use coherence_core::corpus::segment_sentences;
use coherence_core::Discourse;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonDiscourse {
    Sentences(Vec<String>),
    Record {
        id: Option<String>,
        sentences: Option<Vec<String>>,
        text: Option<String>,
    },
}

/// Reads `path`, or stdin for `-`.
pub fn read_text(path: &Path) -> Result<String, CliError> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Usage(format!("cannot read stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

/// One input line: a JSON sentence list, a JSON object with `sentences` or `text`
/// (and optionally `id`), or raw text to be segmented.
pub fn parse_discourse(line: &str, line_no: usize) -> Result<(Option<String>, Discourse), String> {
    let trimmed = line.trim();
    let (id, sentences) = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        match serde_json::from_str::<JsonDiscourse>(trimmed).map_err(|e| format!("malformed JSON: {e}"))? {
            JsonDiscourse::Sentences(s) => (None, s),
            JsonDiscourse::Record { id, sentences: Some(s), .. } => (id, s),
            JsonDiscourse::Record { id, text: Some(t), .. } => (id, segment_sentences(&t).map_err(|e| e.to_string())?),
            JsonDiscourse::Record { .. } => return Err("record needs `sentences` or `text`".into()),
        }
    } else {
        (None, segment_sentences(trimmed).map_err(|e| e.to_string())?)
    };
    let origin = id.clone().unwrap_or_else(|| format!("line-{line_no}"));
    let d = Discourse::new(sentences, origin).map_err(|e| e.to_string())?;
    Ok((id, d))
}
