//! Readers for rating files, score files and pair files.
//!
//! Ratings are line-delimited JSON in one of two layouts, detected per line:
//!
//! - annotated summaries: `{"id", "model_id", "decoded", "expert_annotations": [{"coherence", ..}, ..]}`;
//!   the human score is the mean expert coherence rating and `decoded` is segmented
//!   into sentences;
//! - canonical cells: `{"doc_id", "system_id", "sentences": [..] | "text", "human"}`.
//!
//! Score files hold `{"doc_id", "system_id", "score"}` per line. Pair files hold
//! `{"id", "a", "b", "gold"}` (each side a sentence list or raw text, `gold` one of
//! `"a"`, `"b"` or absent) or intrusion-style `{"id", "coherent", "incoherent"}`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{MetaEvalError, ModelScores, RankingPair, RatedDocument, RatingMatrix, SystemOutput};
use crate::corpus::{segment_sentences, Discourse};
use crate::scoring::Verdict;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> MetaEvalError + '_ {
    move |source| MetaEvalError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_err(line: usize) -> impl Fn(String) -> MetaEvalError {
    move |message| MetaEvalError::Parse { line, message }
}

/// Non-blank lines with their 1-based numbers.
fn json_lines(path: &Path) -> Result<Vec<(usize, Value)>, MetaEvalError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(&line).map_err(|e| parse_err(idx + 1)(e.to_string()))?;
        out.push((idx + 1, v));
    }
    Ok(out)
}

fn field<'a>(v: &'a Value, name: &str, line: usize) -> Result<&'a Value, MetaEvalError> {
    v.get(name)
        .ok_or_else(|| parse_err(line)(format!("missing field `{name}`")))
}

fn string_field(v: &Value, name: &str, line: usize) -> Result<String, MetaEvalError> {
    match field(v, name, line)? {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(parse_err(line)(format!("field `{name}` must be a string"))),
    }
}

/// A sentence list, or raw text that gets segmented.
fn sentences_of(v: &Value, name: &str, line: usize) -> Result<Vec<String>, MetaEvalError> {
    match v {
        Value::String(text) => segment_sentences(text).map_err(|e| parse_err(line)(format!("`{name}`: {e}"))),
        Value::Array(items) => items
            .iter()
            .map(|i| {
                i.as_str()
                    .map(str::to_owned)
                    .ok_or_else(|| parse_err(line)(format!("`{name}` must hold strings")))
            })
            .collect(),
        _ => Err(parse_err(line)(format!("`{name}` must be text or a list of sentences"))),
    }
}

fn discourse(sentences: Vec<String>, origin: String, line: usize) -> Result<Discourse, MetaEvalError> {
    Discourse::new(sentences, origin).map_err(|e| parse_err(line)(e.to_string()))
}

pub fn read_ratings(path: &Path) -> Result<RatingMatrix, MetaEvalError> {
    let mut order: Vec<String> = Vec::new();
    let mut docs: BTreeMap<String, Vec<SystemOutput>> = BTreeMap::new();
    for (line, v) in json_lines(path)? {
        let (doc_id, system_id, sentences, human) = if v.get("expert_annotations").is_some() {
            let doc_id = string_field(&v, "id", line)?;
            let system_id = string_field(&v, "model_id", line)?;
            let sentences = sentences_of(field(&v, "decoded", line)?, "decoded", line)?;
            let ratings: Vec<f64> = field(&v, "expert_annotations", line)?
                .as_array()
                .ok_or_else(|| parse_err(line)("`expert_annotations` must be a list".into()))?
                .iter()
                .map(|a| {
                    a.get("coherence")
                        .and_then(Value::as_f64)
                        .ok_or_else(|| parse_err(line)("annotation without numeric `coherence`".into()))
                })
                .collect::<Result<_, _>>()?;
            if ratings.is_empty() {
                return Err(parse_err(line)("no expert annotations".into()));
            }
            let human = ratings.iter().sum::<f64>() / ratings.len() as f64;
            (doc_id, system_id, sentences, human)
        } else {
            let doc_id = string_field(&v, "doc_id", line)?;
            let system_id = string_field(&v, "system_id", line)?;
            let sentences = match (v.get("sentences"), v.get("text")) {
                (Some(s), _) => sentences_of(s, "sentences", line)?,
                (None, Some(t)) => sentences_of(t, "text", line)?,
                (None, None) => return Err(parse_err(line)("missing field `sentences` or `text`".into())),
            };
            let human = field(&v, "human", line)?
                .as_f64()
                .ok_or_else(|| parse_err(line)("`human` must be a number".into()))?;
            (doc_id, system_id, sentences, human)
        };
        let discourse = discourse(sentences, format!("{doc_id}/{system_id}"), line)?;
        if !docs.contains_key(&doc_id) {
            order.push(doc_id.clone());
        }
        docs.entry(doc_id).or_default().push(SystemOutput {
            system_id,
            discourse,
            human,
        });
    }
    let documents = order
        .into_iter()
        .map(|doc_id| {
            let outputs = docs.remove(&doc_id).unwrap_or_default();
            RatedDocument { doc_id, outputs }
        })
        .collect();
    RatingMatrix::new(documents)
}

#[derive(Serialize, Deserialize)]
struct ScoreRecord {
    doc_id: String,
    system_id: String,
    score: f64,
}

pub fn read_scores(path: &Path) -> Result<ModelScores, MetaEvalError> {
    let mut out = ModelScores::new();
    for (line, v) in json_lines(path)? {
        let r: ScoreRecord = serde_json::from_value(v).map_err(|e| parse_err(line)(e.to_string()))?;
        if out.entry(r.doc_id.clone()).or_default().insert(r.system_id.clone(), r.score).is_some() {
            return Err(parse_err(line)(format!("duplicate score for {}/{}", r.doc_id, r.system_id)));
        }
    }
    Ok(out)
}

pub fn write_scores(scores: &ModelScores, path: &Path) -> Result<(), MetaEvalError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for (doc_id, row) in scores {
        for (system_id, &score) in row {
            let rec = ScoreRecord {
                doc_id: doc_id.clone(),
                system_id: system_id.clone(),
                score,
            };
            let line = serde_json::to_string(&rec).expect("score records serialize");
            writeln!(w, "{line}").map_err(io_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}

pub fn read_pairs(path: &Path) -> Result<Vec<RankingPair>, MetaEvalError> {
    json_lines(path)?
        .into_iter()
        .map(|(line, v)| {
            let id = match v.get("id") {
                Some(_) => string_field(&v, "id", line)?,
                None => format!("line-{line}"),
            };
            let (a, b, gold) = if v.get("coherent").is_some() {
                (
                    sentences_of(field(&v, "coherent", line)?, "coherent", line)?,
                    sentences_of(field(&v, "incoherent", line)?, "incoherent", line)?,
                    Some(Verdict::A),
                )
            } else {
                let gold = match v.get("gold") {
                    None | Some(Value::Null) => None,
                    Some(Value::String(g)) if g.eq_ignore_ascii_case("a") => Some(Verdict::A),
                    Some(Value::String(g)) if g.eq_ignore_ascii_case("b") => Some(Verdict::B),
                    Some(other) => return Err(parse_err(line)(format!("gold must be \"a\" or \"b\", got {other}"))),
                };
                (
                    sentences_of(field(&v, "a", line)?, "a", line)?,
                    sentences_of(field(&v, "b", line)?, "b", line)?,
                    gold,
                )
            };
            Ok(RankingPair {
                a: discourse(a, format!("{id}/a"), line)?,
                b: discourse(b, format!("{id}/b"), line)?,
                id,
                gold,
            })
        })
        .collect()
}
