//! Rule-based sentence segmentation.
//!
//! A boundary is placed after a run of terminal punctuation (`.`, `!`, `?`, `…`),
//! optionally followed by closing quotes or brackets, when the next non-space
//! character is an uppercase letter or an opening quote. A single `.` after a
//! known abbreviation ("Dr.", "vs.") or a dotted initialism ("U.S.", "e.g.")
//! never ends a sentence.

use super::CorpusError;
use crate::text::collapse_whitespace;

const TERMINATORS: &[char] = &['.', '!', '?', '…'];
const CLOSERS: &[char] = &['"', '\'', ')', ']', '”', '’', '»'];
const OPENING_QUOTES: &[char] = &['"', '\'', '“', '‘', '«'];

const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "st", "jr", "sr", "gen", "sen", "rep", "gov", "lt", "col",
    "capt", "sgt", "mt", "vs", "etc", "inc", "ltd", "co", "corp", "fig", "jan", "feb", "mar",
    "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec", "approx", "dept", "est",
];

/// Splits raw text into sentences.
///
/// Every returned sentence is trimmed and has internal whitespace runs collapsed to a
/// single space, so joining the output with `" "` reproduces the whitespace-collapsed
/// input.
pub fn segment_sentences(text: &str) -> Result<Vec<String>, CorpusError> {
    if text.trim().is_empty() {
        return Err(CorpusError::InvalidInput("cannot segment empty text".into()));
    }
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut sentences = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        let (_, c) = chars[i];
        if !TERMINATORS.contains(&c) {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < chars.len() && TERMINATORS.contains(&chars[i].1) {
            i += 1;
        }
        let run_end = i;
        while i < chars.len() && CLOSERS.contains(&chars[i].1) {
            i += 1;
        }
        let boundary = byte_at(&chars, i, text.len());
        if i >= chars.len() {
            break;
        }
        if !chars[i].1.is_whitespace() {
            continue;
        }
        let mut j = i;
        while j < chars.len() && chars[j].1.is_whitespace() {
            j += 1;
        }
        if j >= chars.len() {
            break;
        }
        let next = chars[j].1;
        if !(next.is_uppercase() || OPENING_QUOTES.contains(&next)) {
            continue;
        }
        let single_period = run_end - run_start == 1 && chars[run_start].1 == '.';
        if single_period && is_abbreviation(&word_before(text, &chars, run_start)) {
            continue;
        }
        push_sentence(&mut sentences, &text[start..boundary]);
        start = boundary;
    }
    push_sentence(&mut sentences, &text[start..]);
    Ok(sentences)
}

fn byte_at(chars: &[(usize, char)], idx: usize, len: usize) -> usize {
    chars.get(idx).map_or(len, |&(b, _)| b)
}

fn push_sentence(out: &mut Vec<String>, raw: &str) {
    let s = collapse_whitespace(raw);
    if !s.is_empty() {
        out.push(s);
    }
}

/// The whitespace-delimited word ending just before `period_idx`, without leading
/// opening punctuation.
fn word_before(text: &str, chars: &[(usize, char)], period_idx: usize) -> String {
    let mut k = period_idx;
    while k > 0 && !chars[k - 1].1.is_whitespace() {
        k -= 1;
    }
    let from = chars[k].0;
    let to = chars[period_idx].0;
    text[from..to]
        .trim_start_matches(|c: char| OPENING_QUOTES.contains(&c) || c == '(' || c == '[')
        .to_string()
}

fn is_abbreviation(word: &str) -> bool {
    if word.is_empty() {
        return false;
    }
    let lower = word.to_lowercase();
    if ABBREVIATIONS.contains(&lower.as_str()) {
        return true;
    }
    // dotted initialisms: "U.S", "e.g", "a.m", "J.K"
    let parts: Vec<&str> = lower.split('.').collect();
    parts.len() >= 2
        && parts
            .iter()
            .all(|p| p.chars().count() == 1 && p.chars().all(char::is_alphabetic))
}
