//! Line-delimited JSON persistence for labelled samples and raw documents.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CorpusError, Discourse, Document, Label, LabeledSample, Provenance};

/// On-disk record. Field order is the serialization order and must not change.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleRecord {
    id: String,
    sentences: Vec<String>,
    label: Label,
    provenance: Provenance,
    pair_id: String,
    origin_id: String,
}

impl From<&LabeledSample> for SampleRecord {
    fn from(s: &LabeledSample) -> Self {
        Self {
            id: s.id.clone(),
            sentences: s.discourse.sentences().to_vec(),
            label: s.label,
            provenance: s.provenance,
            pair_id: s.pair_id.clone(),
            origin_id: s.discourse.origin_id().to_owned(),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Checks dataset-wide invariants: unique sample ids, per-sample label/provenance
/// consistency, and that every incoherent sample's `pair_id` names exactly one
/// coherent sample.
pub fn check_integrity(samples: &[LabeledSample]) -> Result<(), CorpusError> {
    let mut ids = HashSet::new();
    let mut positives: HashMap<&str, usize> = HashMap::new();
    for s in samples {
        s.validate()?;
        if !ids.insert(s.id.as_str()) {
            return Err(CorpusError::Integrity(format!("duplicate sample id {}", s.id)));
        }
        if s.label == Label::Coherent {
            *positives.entry(s.pair_id.as_str()).or_default() += 1;
        }
    }
    for s in samples.iter().filter(|s| s.label == Label::Incoherent) {
        match positives.get(s.pair_id.as_str()).copied().unwrap_or(0) {
            1 => {}
            0 => {
                return Err(CorpusError::Integrity(format!(
                    "negative {} has pair_id {} with no coherent counterpart",
                    s.id, s.pair_id
                )))
            }
            n => {
                return Err(CorpusError::Integrity(format!(
                    "negative {} has pair_id {} shared by {n} coherent samples",
                    s.id, s.pair_id
                )))
            }
        }
    }
    Ok(())
}

/// Writes one JSON record per line (LF endings) after checking integrity.
pub fn write_dataset(samples: &[LabeledSample], path: &Path) -> Result<(), CorpusError> {
    check_integrity(samples)?;
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for s in samples {
        let line = serde_json::to_string(&SampleRecord::from(s))
            .expect("sample records always serialize");
        w.write_all(line.as_bytes()).map_err(io_err(path))?;
        w.write_all(b"\n").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_dataset(path: &Path) -> Result<Vec<LabeledSample>, CorpusError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut samples = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            return Err(CorpusError::Parse {
                line: line_no,
                message: "blank line".into(),
            });
        }
        let record: SampleRecord = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let to_parse_err = |e: CorpusError| CorpusError::Parse {
            line: line_no,
            message: e.to_string(),
        };
        let discourse = Discourse::new(record.sentences, record.origin_id).map_err(to_parse_err)?;
        let sample = LabeledSample {
            id: record.id,
            discourse,
            label: record.label,
            provenance: record.provenance,
            pair_id: record.pair_id,
        };
        sample.validate().map_err(to_parse_err)?;
        samples.push(sample);
    }
    check_integrity(&samples)?;
    Ok(samples)
}

/// Loads raw documents from a directory of plain-text files (id = file stem, read in
/// file-name order) or from a line-delimited file of `{id, text, source}` records.
pub fn read_documents(path: &Path) -> Result<Vec<Document>, CorpusError> {
    let docs = if path.is_dir() {
        let mut entries: Vec<_> = fs::read_dir(path)
            .map_err(io_err(path))?
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.is_file())
            .collect();
        entries.sort();
        let mut docs = Vec::with_capacity(entries.len());
        for p in entries {
            let text = fs::read_to_string(&p).map_err(io_err(&p))?;
            if text.trim().is_empty() {
                tracing::warn!(path = %p.display(), "skipping empty document");
                continue;
            }
            let id = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            docs.push(Document::new(id, text, super::Source::Other)?);
        }
        docs
    } else {
        let file = fs::File::open(path).map_err(io_err(path))?;
        let mut docs = Vec::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(io_err(path))?;
            if line.trim().is_empty() {
                continue;
            }
            let doc: Document = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
                line: idx + 1,
                message: e.to_string(),
            })?;
            doc.validate().map_err(|e| CorpusError::Parse {
                line: idx + 1,
                message: e.to_string(),
            })?;
            docs.push(doc);
        }
        docs
    };
    let mut seen = HashSet::new();
    for d in &docs {
        if !seen.insert(d.id.as_str()) {
            return Err(CorpusError::InvalidInput(format!("duplicate document id {}", d.id)));
        }
    }
    Ok(docs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(id: &str, sents: &[&str], label: Label, prov: Provenance, pair: &str) -> LabeledSample {
        LabeledSample {
            id: id.into(),
            discourse: Discourse::new(sents.iter().map(|s| s.to_string()).collect(), pair).unwrap(),
            label,
            provenance: prov,
            pair_id: pair.into(),
        }
    }

    fn three() -> Vec<LabeledSample> {
        vec![
            sample("a:pos", &["A one.", "A two."], Label::Coherent, Provenance::Original, "a"),
            sample("a:neg", &["A two.", "A one."], Label::Incoherent, Provenance::GlobalShuffle, "a"),
            sample("b:pos", &["B one.", "B two.", "B three."], Label::Coherent, Provenance::Original, "b"),
        ]
    }

    #[test]
    fn write_then_read_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        let samples = three();
        write_dataset(&samples, &path).unwrap();
        assert_eq!(read_dataset(&path).unwrap(), samples);
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with(r#"{"id":"a:pos","sentences":["A one.","A two."],"label":"coherent","provenance":"original","pair_id":"a","origin_id":"a"}"#));
    }

    #[test]
    fn missing_label_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        let samples = three();
        write_dataset(&samples, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let broken: Vec<String> = text
            .lines()
            .enumerate()
            .map(|(i, l)| if i == 1 { l.replace(r#""label":"incoherent","#, "") } else { l.to_string() })
            .collect();
        fs::write(&path, broken.join("\n") + "\n").unwrap();
        match read_dataset(&path) {
            Err(CorpusError::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("label"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn dangling_pair_is_integrity_error() {
        let mut samples = three();
        samples[1].pair_id = "zzz".into();
        assert!(matches!(check_integrity(&samples), Err(CorpusError::Integrity(_))));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        assert!(matches!(write_dataset(&samples, &path), Err(CorpusError::Integrity(_))));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut samples = three();
        samples[2].id = "a:pos".into();
        assert!(matches!(check_integrity(&samples), Err(CorpusError::Integrity(_))));
    }

    #[test]
    fn provenance_label_mismatch_rejected() {
        let mut samples = three();
        samples[1].provenance = Provenance::Original;
        assert!(check_integrity(&samples).is_err());
    }

    #[test]
    fn documents_from_jsonl_and_dir() {
        let dir = tempfile::tempdir().unwrap();
        let jsonl = dir.path().join("docs.jsonl");
        fs::write(
            &jsonl,
            "{\"id\":\"n1\",\"text\":\"A. B.\",\"source\":\"news\"}\n{\"id\":\"w1\",\"text\":\"C.\",\"source\":\"encyclopedia\"}\n",
        )
        .unwrap();
        let docs = read_documents(&jsonl).unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].source, super::super::Source::News);

        let txt = dir.path().join("txt");
        fs::create_dir(&txt).unwrap();
        fs::write(txt.join("b.txt"), "Second doc.").unwrap();
        fs::write(txt.join("a.txt"), "First doc.").unwrap();
        let docs = read_documents(&txt).unwrap();
        assert_eq!(docs.iter().map(|d| d.id.as_str()).collect::<Vec<_>>(), vec!["a", "b"]);
    }
}
