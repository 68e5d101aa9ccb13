//! Frozen outputs. Run with `MTLENS_BLESS=1` to rewrite them after an
//! intentional change, then review the diff by hand.

use std::fs;
use std::path::PathBuf;

use mtlens::augment::{merge_tag, TagPolicy};
use mtlens::corpus::{load_corpus, write_corpus, Corpus};
use mtlens::detector::{self, FeatureConfig, TrainParams};
use mtlens::translation::{load_dictionary, roundtrip, translate_test, DecodingSpec, MockBackend};
use serde_json::{json, Value};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn blessing() -> bool {
    std::env::var_os("MTLENS_BLESS").is_some()
}

fn check_text(name: &str, actual: &str) {
    let path = fixture("golden").join(name);
    if blessing() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|e| {
        panic!(
            "{}: {e} (run with MTLENS_BLESS=1 to create)",
            path.display()
        )
    });
    assert_eq!(actual, expected, "golden {name} differs");
}

fn corpus_text(c: &Corpus) -> String {
    let mut buf = Vec::new();
    write_corpus(c, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

fn mock() -> MockBackend {
    MockBackend::new(load_dictionary(&fixture("simplify_dict.json")).unwrap(), 0)
}

#[test]
fn canonical_corpus_writer() {
    let c = load_corpus(fixture("corpus_5.jsonl")).unwrap();
    assert_eq!(c.len(), 5);
    let text = corpus_text(&c);
    check_text("corpus_5.canonical.jsonl", &text);
    // Canonical form is a fixed point.
    let again = mtlens::corpus::read_corpus(text.as_bytes(), Default::default()).unwrap();
    assert_eq!(corpus_text(&again), text);
}

#[test]
fn roundtrip_small_en() {
    let c = load_corpus(fixture("small_en.jsonl")).unwrap();
    let rt = roundtrip(
        &c,
        "de",
        &mock(),
        &DecodingSpec::roundtrip_forward().with_seed(Some(13)),
        &DecodingSpec::roundtrip_backward(),
    )
    .unwrap();
    check_text("small_en.rt_de.jsonl", &corpus_text(&rt));
}

#[test]
fn translate_test_small_ko() {
    let c = load_corpus(fixture("small_ko.jsonl")).unwrap();
    let en = translate_test(&c, "ko", &mock(), &DecodingSpec::translate_test()).unwrap();
    check_text("small_ko.tt_en.jsonl", &corpus_text(&en));
}

#[test]
fn merge_tag_six_samples() {
    let human = load_corpus(fixture("merge_human.jsonl")).unwrap();
    let machine = roundtrip(
        &human,
        "ko",
        &mock(),
        &DecodingSpec::roundtrip_backward(),
        &DecodingSpec::roundtrip_backward(),
    )
    .unwrap();
    let (out, manifest) = merge_tag(&human, &machine, &TagPolicy::default()).unwrap();
    assert_eq!(out.len(), 6);
    assert_eq!(manifest.steps_scale, 0.5);
    check_text("merge_tag.jsonl", &corpus_text(&out));
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn detector_scores_and_evaluation() {
    let human = load_corpus(fixture("questions_en.jsonl")).unwrap();
    let rt = roundtrip(
        &human,
        "de",
        &mock(),
        &DecodingSpec::roundtrip_forward().with_seed(Some(13)),
        &DecodingSpec::roundtrip_backward(),
    )
    .unwrap();
    let params = TrainParams {
        seed: 5,
        ..TrainParams::default()
    };
    let model = detector::train(&human, &rt, &FeatureConfig::default(), &params).unwrap();
    let texts: Vec<&str> = human
        .texts()
        .into_iter()
        .take(3)
        .chain(rt.texts().into_iter().take(2))
        .collect();
    let scores: Vec<f64> = texts.iter().map(|t| model.score(t)).collect();
    let accuracy = detector::evaluate(&model, &human, &rt).unwrap();
    let actual = json!({
        "texts": texts,
        "scores": scores,
        "evaluate": accuracy,
        "validation_accuracy": model.validation_accuracy,
    });

    let path = fixture("golden").join("detector_scores.json");
    if blessing() {
        fs::write(&path, serde_json::to_string_pretty(&actual).unwrap() + "\n").unwrap();
        return;
    }
    let expected: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(expected["texts"], actual["texts"]);
    for (e, a) in expected["scores"].as_array().unwrap().iter().zip(&scores) {
        assert!(close(e.as_f64().unwrap(), *a, 1e-9), "{e} vs {a}");
    }
    assert!(close(
        expected["evaluate"].as_f64().unwrap(),
        accuracy,
        1e-9
    ));
    assert_eq!(
        expected["validation_accuracy"].as_f64().unwrap(),
        model.validation_accuracy
    );
}
