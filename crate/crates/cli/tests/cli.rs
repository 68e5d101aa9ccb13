use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mtlens::corpus::load_corpus;
use mtlens::metrics::{bleu, corpus_diversity, Stoplist};
use mtlens::reprdist::{fid_between, load_embeddings, DEFAULT_EPS};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn mtlens(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtlens"))
        .args(args)
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn fid_of_a_file_with_itself_is_zero() {
    let a = fixture("emb_a.bin");
    let v = json(&mtlens(&["fid", "--a", s(&a), "--b", s(&a)]));
    assert_eq!(v["fid"], 0.0);
}

#[test]
fn fid_matches_library() {
    let (a, b) = (fixture("emb_a.bin"), fixture("emb_b.bin"));
    let v = json(&mtlens(&["fid", "--a", s(&a), "--b", s(&b)]));
    let lib = fid_between(
        &load_embeddings(&a).unwrap(),
        &load_embeddings(&b).unwrap(),
        DEFAULT_EPS,
    )
    .unwrap();
    assert_eq!(v["fid"].as_f64().unwrap(), lib.fid);
}

#[test]
fn diversity_matches_library() {
    let path = fixture("questions_en.jsonl");
    let v = json(&mtlens(&["diversity", "--in", s(&path)]));
    let lib = corpus_diversity(&load_corpus(&path).unwrap(), &Stoplist::english()).unwrap();
    assert_eq!(v["ttr"].as_f64().unwrap(), lib.ttr);
    assert_eq!(v["ld"].as_f64().unwrap(), lib.ld);
}

#[test]
fn mt_score_reads_plain_lines() {
    let frozen: Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("mt_pairs.json")).unwrap()).unwrap();
    let lines = |k: &str| -> Vec<String> {
        frozen[k]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_str().unwrap().to_string())
            .collect()
    };
    let dir = tempfile::tempdir().unwrap();
    let (h, r) = (dir.path().join("hyp.txt"), dir.path().join("ref.txt"));
    std::fs::write(&h, lines("hypotheses").join("\n") + "\n").unwrap();
    std::fs::write(&r, lines("references").join("\n") + "\n").unwrap();
    let v = json(&mtlens(&["mt-score", "--hyp", s(&h), "--ref", s(&r)]));
    let lib = bleu(&lines("hypotheses"), &lines("references")).unwrap();
    assert_eq!(v["value"].as_f64().unwrap(), lib.value);
}

#[test]
fn exit_codes() {
    let missing = mtlens(&["diversity", "--in", "/nonexistent/x.jsonl"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("--in"));

    assert_eq!(mtlens(&["fid", "--bogus"]).status.code(), Some(2));
    assert_eq!(mtlens(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    std::fs::write(&a, "[1, 2, 3]").unwrap();
    let out = mtlens(&["ttest", "--a", s(&a), "--b", s(&a)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: DegenerateZeroVariance"));

    let bad = dir.path().join("bad.bin");
    std::fs::write(&bad, b"NOPE").unwrap();
    let out = mtlens(&["fid", "--a", s(&bad), "--b", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("mtlens.ini");
    std::fs::write(&cfg, format!("[ttest]\na = {}\n", s(&fixture("nope.txt")))).unwrap();
    let good = dir.path().join("g.txt");
    std::fs::write(&good, "1 2 3").unwrap();
    let zeros = dir.path().join("z.txt");
    std::fs::write(&zeros, "0 0 0").unwrap();

    // Config value alone points at a missing file.
    let out = mtlens(&["--config", s(&cfg), "ttest", "--b", s(&zeros)]);
    assert_eq!(out.status.code(), Some(2));
    // The command line overrides it.
    let v = json(&mtlens(&[
        "--config",
        s(&cfg),
        "ttest",
        "--a",
        s(&good),
        "--b",
        s(&zeros),
    ]));
    assert!((v["t"].as_f64().unwrap() - 3.4641).abs() < 1e-3);
}

#[test]
fn roundtrip_is_reproducible_from_the_command_line() {
    let dict = format!("mock:{}", s(&fixture("simplify_dict.json")));
    let input = fixture("small_en.jsonl");
    let args = [
        "roundtrip",
        "--in",
        s(&input),
        "--pivot",
        "de",
        "--backend",
        &dict,
        "--seed",
        "13",
    ];
    let first = mtlens(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, mtlens(&args).stdout);
    let golden = std::fs::read(fixture("golden/small_en.rt_de.jsonl")).unwrap();
    assert_eq!(first.stdout, golden);
}
