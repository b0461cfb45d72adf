//! Synthetic discourses and documents for tests.
#![allow(dead_code)]

use coherence_core::{Discourse, Document, Source};
use rand::seq::SliceRandom;
use rand::Rng;

const SUBJECTS: &[&str] = &[
    "council", "harbour", "museum", "railway", "hospital", "library", "festival", "bridge",
    "school", "orchestra", "factory", "market", "airport", "stadium", "reservoir", "gallery",
];
const VERBS: &[&str] = &[
    "approved", "opened", "delayed", "expanded", "reviewed", "funded", "closed", "renovated",
    "announced", "inspected",
];
const OBJECTS: &[&str] = &[
    "a new wing", "the annual budget", "extra staff", "a safety plan", "the west entrance",
    "a public hearing", "night services", "a water survey", "free tours", "the parking rules",
];
const PLACES: &[&str] = &[
    "Leeds", "Oslo", "Porto", "Quebec", "Nagoya", "Tartu", "Cork", "Lyon", "Graz", "Perth",
];

/// Random sentence with some words drawn from `topic`.
pub fn sentence<R: Rng + ?Sized>(rng: &mut R, topic: &str) -> String {
    let verb = VERBS.choose(rng).unwrap();
    let object = OBJECTS.choose(rng).unwrap();
    let place = PLACES.choose(rng).unwrap();
    let n: u32 = rng.gen_range(1..1000);
    match rng.gen_range(0..3) {
        0 => format!("The {topic} in {place} {verb} {object} after {n} complaints."),
        1 => format!("Officials said the {topic} {verb} {object} on schedule."),
        _ => format!("In {place}, {n} residents watched as the {topic} {verb} {object}."),
    }
}

/// Discourse of `n` distinct sentences.
pub fn discourse<R: Rng + ?Sized>(rng: &mut R, n: usize, id: &str) -> Discourse {
    let topic = SUBJECTS.choose(rng).unwrap();
    let mut out: Vec<String> = Vec::with_capacity(n);
    while out.len() < n {
        let s = sentence(rng, topic);
        if !out.contains(&s) {
            out.push(s);
        }
    }
    Discourse::new(out, id).unwrap()
}

/// Discourse whose sentences may repeat (but not all identical).
pub fn discourse_with_repeats<R: Rng + ?Sized>(rng: &mut R, n: usize, id: &str) -> Discourse {
    let pool = ["Alpha rose.", "Beta fell.", "Gamma held."];
    loop {
        let s: Vec<String> = (0..n).map(|_| pool.choose(rng).unwrap().to_string()).collect();
        if s.iter().any(|x| *x != s[0]) {
            return Discourse::new(s, id).unwrap();
        }
    }
}

/// News-style documents with 2..=8 sentences each.
pub fn documents<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<Document> {
    (0..count)
        .map(|i| {
            let n = rng.gen_range(2..=8);
            let d = discourse(rng, n, &format!("doc{i:04}"));
            Document {
                id: format!("doc{i:04}"),
                text: d.sentences().join(" "),
                source: Source::News,
            }
        })
        .collect()
}
