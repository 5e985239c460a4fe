use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn testinj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_testinj")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = testinj(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn code(args: &[&str]) -> i32 {
    testinj(args).status.code().expect("exited normally")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Scenario sample written by `synth` into a fresh directory.
fn scenario(n: usize, seed: u64) -> (TempDir, PathBuf) {
    let dir = TempDir::new().unwrap();
    ok(&["synth", "--n", &n.to_string(), "--seed", &seed.to_string(), "--out", s(dir.path())]);
    let data = dir.path().join("synth.csv");
    (dir, data)
}

#[test]
fn expand_lexicon_is_a_deterministic_superset() {
    let dir = TempDir::new().unwrap();
    let wn = fixture("wordnet");
    ok(&["expand-lexicon", "--wordnet", s(&wn), "--out", s(dir.path())]);
    let first = read(dir.path(), "lexicon.tsv");
    let base = testinj::lexicon::Lexicon::base();
    let expanded = testinj::lexicon::Lexicon::from_tsv("lexicon.tsv", &first).unwrap();
    assert!(expanded.is_superset_of(&base));
    assert!(expanded.contains(testinj::lexicon::TermCategory::Stigmatizing, "drug addict"));
    assert!(!first.contains("take a firm stand"), "four-token synonyms are dropped");
    ok(&["expand-lexicon", "--wordnet", s(&wn), "--out", s(dir.path())]);
    assert_eq!(read(dir.path(), "lexicon.tsv"), first);
}

#[test]
fn expand_lexicon_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&["expand-lexicon", "--wordnet", "/no/such/dict", "--out", s(dir.path())]), 2);
    assert_eq!(code(&["expand-lexicon", "--out", s(dir.path())]), 2);
    let bad = dir.path().join("bad.tsv");
    std::fs::write(&bad, "evidential says\n").unwrap();
    let wn = fixture("wordnet");
    assert_eq!(code(&["expand-lexicon", "--wordnet", s(&wn), "--lexicon", s(&bad), "--out", s(dir.path())]), 3);
}

#[test]
fn label_matches_hand_labels() {
    let dir = TempDir::new().unwrap();
    let out = ok(&["label", "--input", s(&fixture("notes.csv")), "--out", s(dir.path())]);
    assert_eq!(read(dir.path(), "dataset.csv"), std::fs::read_to_string(fixture("expected_dataset.csv")).unwrap());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("patients   3"), "{stdout}");
    let thresholds: serde_json::Value = serde_json::from_str(&read(dir.path(), "thresholds.json")).unwrap();
    assert_eq!(thresholds["thresholds"]["negative"], 0.2);
    assert_eq!(read(dir.path(), "groups.csv").lines().count(), 4);
}

#[test]
fn coarse_flag_is_or_of_fine_flags() {
    let fine = TempDir::new().unwrap();
    let coarse = TempDir::new().unwrap();
    let notes = fixture("notes.csv");
    ok(&["label", "--input", s(&notes), "--out", s(fine.path())]);
    ok(&["label", "--input", s(&notes), "--granularity", "coarse", "--out", s(coarse.path())]);
    let f = testinj::BinaryDataset::read_csv(read(fine.path(), "dataset.csv").as_bytes()).unwrap();
    let c = testinj::BinaryDataset::read_csv(read(coarse.path(), "dataset.csv").as_bytes()).unwrap();
    let merged = c.column_by_name("is_marginalized").unwrap();
    for r in 0..f.n_rows() {
        assert_eq!(merged[r], f.row(r)[..3].iter().fold(0, |a, b| a | b));
        assert_eq!(f.row(r)[3..], c.row(r)[1..]);
    }
}

#[test]
fn label_errors() {
    let dir = TempDir::new().unwrap();
    let out = s(dir.path());
    assert_eq!(code(&["label", "--input", s(&fixture("empty.csv")), "--out", out]), 3);
    assert_eq!(code(&["label", "--input", s(&fixture("malformed.csv")), "--out", out]), 3);
    assert_eq!(code(&["label", "--input", "/no/such.csv", "--out", out]), 2);
    assert_eq!(code(&["label", "--out", out]), 2);
    assert_eq!(code(&["label", "--input", s(&fixture("notes.csv")), "--fraction", "0", "--out", out]), 2);
}

#[test]
fn label_reads_manifest() {
    let dir = TempDir::new().unwrap();
    let manifest = dir.path().join("files.txt");
    std::fs::write(&manifest, format!("# notes\n{}\n", fixture("notes.csv").display())).unwrap();
    ok(&["label", "--manifest", s(&manifest), "--out", s(dir.path())]);
    assert_eq!(read(dir.path(), "dataset.csv"), std::fs::read_to_string(fixture("expected_dataset.csv")).unwrap());
}

#[test]
fn discover_recovers_scenario_edges() {
    let (dir, data) = scenario(30_000, 4);
    ok(&["discover", "--data", s(&data), "--out", s(dir.path())]);
    let dot = read(dir.path(), "graph.dot");
    assert!(dot.contains("race -> stigmatizing"), "{dot}");
    assert!(dot.contains("gender -> judgementals"), "{dot}");
    let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "report.json")).unwrap();
    assert_eq!(report["config"]["algorithm"], "fci");
    assert!(report.get("wall_time_ms").is_none());
    assert!(read(dir.path(), "trace.csv").starts_with("x,y,Z,statistic,dof,p,independent\n"));

    let again = TempDir::new().unwrap();
    ok(&["discover", "--data", s(&data), "--out", s(again.path())]);
    for f in ["graph.dot", "graph.json", "report.json", "trace.csv"] {
        assert_eq!(read(dir.path(), f), read(again.path(), f), "{f}");
    }
}

#[test]
fn discover_errors() {
    let (dir, data) = scenario(500, 1);
    let out = s(dir.path());
    assert_eq!(code(&["discover", "--data", s(&data), "--alpha", "1.5", "--out", out]), 2);
    assert_eq!(code(&["discover", "--data", s(&data), "--alpha", "0", "--out", out]), 2);
    assert_eq!(code(&["discover", "--data", s(&data), "--roots", "nope", "--out", out]), 2);
    assert_eq!(code(&["discover", "--data", s(&data), "--roots", "race", "--leaf", "race", "--out", out]), 2);
    assert_eq!(code(&["discover", "--out", out]), 2);
    let notbinary = dir.path().join("bad.csv");
    std::fs::write(&notbinary, "a,b\n0,2\n").unwrap();
    assert_eq!(code(&["discover", "--data", s(&notbinary), "--out", out]), 3);
    assert_eq!(code(&["discover", "--data", s(&data), "--algorithm", "ges", "--out", out]), 2);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let (dir, data) = scenario(2000, 2);
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        format!("out = \"{}\"\n[search]\ndata = \"{}\"\nalgorithm = \"pc\"\n[discover]\nalpha = 0.9\n", s(&dir.path().join("cfg")), s(&data)),
    )
    .unwrap();
    ok(&["discover", "--config", s(&cfg), "--alpha", "0.01"]);
    let report: serde_json::Value = serde_json::from_str(&read(&dir.path().join("cfg"), "report.json")).unwrap();
    assert_eq!(report["config"]["algorithm"], "pc");
    assert_eq!(report["config"]["alpha"], 0.01);

    std::fs::write(&cfg, "[discover]\nalpah = 0.1\n").unwrap();
    assert_eq!(code(&["discover", "--config", s(&cfg)]), 2);
    assert_eq!(code(&["discover", "--config", "/no/such.toml"]), 2);
}

#[test]
fn sweep_orders_demographics_and_doubling_lowers_thresholds() {
    let (dir, data) = scenario(50_000, 3);
    let grid = "0.001,0.01,0.05,0.12,0.3,0.6";
    let plain = dir.path().join("plain");
    let doubled = dir.path().join("doubled");
    let out = ok(&["sweep", "--data", s(&data), "--grid", grid, "--out", s(&plain)]);
    ok(&["sweep", "--data", s(&data), "--grid", grid, "--double", "--out", s(&doubled)]);
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.lines().next().unwrap().contains("race"), "{table}");

    let load = |p: &Path| -> testinj::experiment::AlphaSweepResult {
        serde_json::from_str(&read(p, "sweep.json")).unwrap()
    };
    let (a, b) = (load(&plain), load(&doubled));
    assert!(a.minimal("race") <= a.minimal("gender") && a.minimal("gender") <= a.minimal("age"));
    for f in ["race", "gender", "age"] {
        assert!(b.minimal(f) <= a.minimal(f), "{f}");
    }
}

#[test]
fn singleton_sweep_matches_discover() {
    let (dir, data) = scenario(5000, 9);
    ok(&["sweep", "--data", s(&data), "--grid", "0.05", "--out", s(dir.path())]);
    ok(&["discover", "--data", s(&data), "--alpha", "0.05", "--out", s(dir.path())]);
    let sweep: serde_json::Value = serde_json::from_str(&read(dir.path(), "sweep.json")).unwrap();
    let graph: serde_json::Value = serde_json::from_str(&read(dir.path(), "graph.json")).unwrap();
    assert_eq!(sweep["points"][0]["graph"], graph);
}

#[test]
fn sweep_errors() {
    let (dir, data) = scenario(500, 1);
    let out = s(dir.path());
    assert_eq!(code(&["sweep", "--data", s(&data), "--grid", "0.1,0.05", "--out", out]), 2);
    assert_eq!(code(&["sweep", "--data", s(&data), "--grid", "0.1,1.0", "--out", out]), 2);
    assert_eq!(code(&["sweep", "--data", s(&data), "--features", "shoe_size", "--out", out]), 2);
}

#[test]
fn synth_is_seeded() {
    let (a, _) = scenario(1000, 5);
    let (b, _) = scenario(1000, 5);
    let (c, _) = scenario(1000, 6);
    assert_eq!(read(a.path(), "synth.csv"), read(b.path(), "synth.csv"));
    assert_ne!(read(a.path(), "synth.csv"), read(c.path(), "synth.csv"));
    let coarse = TempDir::new().unwrap();
    ok(&["synth", "--n", "100", "--coarse", "--out", s(coarse.path())]);
    assert!(read(coarse.path(), "synth.csv").starts_with("is_marginalized,"));
    assert_eq!(code(&["synth", "--n", "0", "--out", s(coarse.path())]), 2);
}
