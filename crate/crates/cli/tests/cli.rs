#[path = "../../core/tests/common/fixtures.rs"]
mod fixtures;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_coherence"));
    c.env_remove("COHERENCE_BACKEND_URL");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn jsonl(path: &Path) -> Vec<Value> {
    fs::read_to_string(path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn stdout_jsonl(o: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&o.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn write_docs(dir: &Path, count: usize) -> PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let path = dir.join("docs.jsonl");
    let lines: Vec<String> = fixtures::documents(&mut rng, count)
        .iter()
        .map(|d| serde_json::to_string(d).unwrap())
        .collect();
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    path
}

fn augment(dir: &Path, out: &str, extra: &[&str]) -> (PathBuf, Output) {
    let docs = write_docs(dir, 80);
    let out = dir.join(out);
    let mut args = vec!["augment", "--sources", docs.to_str().unwrap(), "--out", out.to_str().unwrap(), "--delta", "0.1"];
    args.extend_from_slice(extra);
    let o = run(&args);
    (out, o)
}

#[test]
fn augment_writes_dataset_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let (out, o) = augment(dir.path(), "a", &["--seed", "4", "--valid-fraction", "0.2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["tool"], "coherence");
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(report["config"]["seed"], 4);
    assert_eq!(report["config"]["augment"]["filter_threshold"], 0.1);
    let c = &report["build"]["counts"];
    let total = c["total"].as_u64().unwrap();
    assert_eq!(total, 2 * (c["n_neg_global"].as_u64().unwrap() + c["n_local_kept"].as_u64().unwrap()));
    assert_eq!(jsonl(&out.join("dataset.jsonl")).len() as u64, total);
    let split = jsonl(&out.join("train.jsonl")).len() + jsonl(&out.join("valid.jsonl")).len();
    assert_eq!(split as u64, total);

    let stats = run(&["dataset-stats", "--dataset", out.join("dataset.jsonl").to_str().unwrap()]);
    assert_eq!(code(&stats), 0);
    let s: Value = serde_json::from_slice(&stats.stdout).unwrap();
    assert_eq!(s["n_samples"].as_u64().unwrap(), total);
    assert_eq!(s["coherent"], s["incoherent"]);
}

#[test]
fn augment_missing_sources_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no-such-corpus");
    let o = run(&["augment", "--sources", missing.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("no-such-corpus"), "{}", stderr(&o));
}

#[test]
fn augment_rejects_bad_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let (_, o) = augment(dir.path(), "a", &["--global-count", "500", "--local-count", "10"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("insufficient"), "{}", stderr(&o));
    let (_, o) = augment(dir.path(), "b", &["--backend", "oracle"]);
    assert_eq!(code(&o), 2);
    let o = run(&["score", "--input", "x", "--lambda", "1.5"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "seed = 5\nworkers = 2\n[augment]\nfilter_threshold = 0.3\nglobal_fraction = 0.5\n[scoring]\nlambda = 0.25\n").unwrap();
    let (out, o) = augment(dir.path(), "a", &["--config", cfg.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["seed"], 7);
    assert_eq!(report["config"]["workers"], 2);
    assert_eq!(report["config"]["scoring"]["lambda"], 0.25);
    assert_eq!(report["config"]["augment"]["global_fraction"], 0.5);
    // --delta 0.1 from the helper wins over the file's 0.3
    assert_eq!(report["config"]["augment"]["filter_threshold"], 0.1);

    fs::write(&cfg, "sed = 5\n").unwrap();
    let (_, o) = augment(dir.path(), "b", &["--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn score_breakdowns_and_partial_failure() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    fs::write(
        &input,
        "[\"The mayor spoke.\", \"The mayor left early.\", \"Rain fell.\"]\nA single sentence.\n\n{not json\n{\"id\": \"t\", \"text\": \"Prices rose. Prices fell again.\"}\n",
    )
    .unwrap();
    let o = run(&["score", "--input", input.to_str().unwrap(), "--lambda", "0"]);
    assert_eq!(code(&o), 1);
    let recs = stdout_jsonl(&o);
    assert_eq!(recs.len(), 4);
    assert_eq!(recs.iter().map(|r| r["line"].as_u64().unwrap()).collect::<Vec<_>>(), vec![1, 2, 4, 5]);
    for r in recs.iter().filter(|r| r.get("error").is_none()) {
        assert_eq!(r["final_score"], r["global_score"]);
    }
    assert_eq!(recs[1]["local_score"], Value::Null);
    assert_eq!(recs[1]["pair_scores"].as_array().unwrap().len(), 0);
    assert!(recs[2]["error"].as_str().unwrap().contains("malformed"));
    assert_eq!(recs[3]["id"], "t");

    let good = dir.path().join("good.txt");
    fs::write(&good, "One thing. Another thing.\n").unwrap();
    let out = dir.path().join("s");
    let o = run(&["score", "--input", good.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(jsonl(&out.join("scores.jsonl")).len(), 1);
    let rep: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(rep["n_scored"], 1);
}

#[test]
fn score_with_unreachable_backend() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    fs::write(&input, "One. Two.\nThree. Four.\n").unwrap();
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let o = bin()
        .args(["score", "--input", input.to_str().unwrap(), "--backend", "remote", "--timeout-secs", "2"])
        .env("COHERENCE_BACKEND_URL", format!("http://127.0.0.1:{port}"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
    let recs = stdout_jsonl(&o);
    assert_eq!(recs.len(), 2);
    assert!(recs.iter().all(|r| r["error"].as_str().unwrap().contains("unreachable")));
    let o = run(&["score", "--input", input.to_str().unwrap(), "--backend", "remote"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn rank_oracle_swap_and_empty() {
    let dir = tempfile::tempdir().unwrap();
    let (out, o) = augment(dir.path(), "a", &[]);
    assert_eq!(code(&o), 0);
    let ds = out.join("dataset.jsonl");
    let r = dir.path().join("r");
    let o = run(&["rank", "--dataset", ds.to_str().unwrap(), "--backend", "oracle", "--out", r.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary: Value = serde_json::from_str(&fs::read_to_string(r.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["accuracy"], 1.0);
    let straight = jsonl(&r.join("verdicts.jsonl"));

    let o = run(&["rank", "--dataset", ds.to_str().unwrap(), "--backend", "oracle", "--swap"]);
    assert_eq!(code(&o), 0);
    let swapped = stdout_jsonl(&o);
    assert_eq!(straight.len(), swapped.len());
    for (a, b) in straight.iter().zip(&swapped) {
        assert_eq!(a["verdict"], "a");
        assert_eq!(b["verdict"], "b");
    }

    let empty = dir.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    assert_eq!(code(&run(&["rank", "--pairs", empty.to_str().unwrap()])), 2);
    let o = run(&["rank", "--pairs", empty.to_str().unwrap(), "--backend", "oracle"]);
    assert_eq!(code(&o), 2);
}

fn ratings_file(dir: &Path) -> PathBuf {
    let path = dir.join("ratings.jsonl");
    let mut lines = Vec::new();
    for d in 0..4 {
        for s in 0..3 {
            let n = 2 + (d + s) % 3;
            let sentences: Vec<String> = (0..n).map(|i| format!("Doc {d} system {s} line {i}.")).collect();
            let human = 1.0 + f64::from(s as u32) + 0.1 * f64::from(d as u32);
            lines.push(serde_json::json!({"doc_id": format!("d{d}"), "system_id": format!("s{s}"), "sentences": sentences, "human": human}).to_string());
        }
    }
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    path
}

#[test]
fn meta_eval_calibrated_scores() {
    let dir = tempfile::tempdir().unwrap();
    let ratings = ratings_file(dir.path());
    let scores = dir.path().join("scores.jsonl");
    let lines: Vec<String> = fs::read_to_string(&ratings)
        .unwrap()
        .lines()
        .map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            serde_json::json!({"doc_id": v["doc_id"], "system_id": v["system_id"], "score": v["human"].as_f64().unwrap() / 10.0}).to_string()
        })
        .collect();
    fs::write(&scores, lines.join("\n") + "\n").unwrap();
    let out = dir.path().join("m");
    let o = run(&["meta-eval", "--ratings", ratings.to_str().unwrap(), "--scores", scores.to_str().unwrap(), "--by-length", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    for level in ["sample", "dataset"] {
        for m in ["rho", "r", "tau"] {
            let v = rep[level][m]["value"].as_f64().unwrap();
            assert!((v - 1.0).abs() < 1e-12, "{level}/{m} = {v}");
        }
    }
    let buckets = rep["length_buckets"].as_array().unwrap();
    assert_eq!(buckets.iter().map(|b| b["n_outputs"].as_u64().unwrap()).sum::<u64>(), 12);
    let table = String::from_utf8_lossy(&o.stdout);
    assert!(table.contains("sample") && table.contains("len=2"));

    // drop one score line
    fs::write(&scores, lines[..lines.len() - 1].join("\n") + "\n").unwrap();
    let o = run(&["meta-eval", "--ratings", ratings.to_str().unwrap(), "--scores", scores.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("d3"), "{}", stderr(&o));

    let o = run(&["meta-eval", "--ratings", ratings.to_str().unwrap(), "--level", "dataset"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}
