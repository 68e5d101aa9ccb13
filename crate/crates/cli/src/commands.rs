use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use mtlens::augment::{self, manifest_path, AugmentManifest, TagPolicy};
use mtlens::corpus::{align, load_corpus, save_corpus, write_corpus, Corpus};
use mtlens::detector::{self, FeatureConfig, TrainParams};
use mtlens::metrics::{
    self, corpus_diversity, group_accuracy, paired_t_test, AccuracyOptions, Stoplist,
};
use mtlens::reprdist::{self, load_embeddings};
use mtlens::translation::{
    self, BackendConfig, DecodingSpec, HttpBackend, TranslationBackend, TranslationError,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or missing inputs; exit status 2.
    Usage(String),
    /// A library error, reported by name; exit status 1.
    Domain { name: &'static str, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain { .. } => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Domain { name, message } => write!(f, "{name}: {message}"),
        }
    }
}

fn domain(e: impl Into<mtlens::Error>) -> CliError {
    let e = e.into();
    CliError::Domain {
        name: e.name(),
        message: e.to_string(),
    }
}

fn io_error(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::Domain {
        name: "IoError",
        message: format!("{}: {e}", path.display()),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

type Result<T> = std::result::Result<T, CliError>;

fn input<'a>(flag: &str, path: &'a Path) -> Result<&'a Path> {
    if path.exists() {
        Ok(path)
    } else {
        Err(usage(format!("{flag}: {} does not exist", path.display())))
    }
}

fn corpus(flag: &str, path: &Path) -> Result<Corpus> {
    load_corpus(input(flag, path)?).map_err(domain)
}

fn named_path(flag: &str, spec: &str) -> Result<(String, PathBuf)> {
    let (name, path) = spec
        .split_once('=')
        .filter(|(n, p)| !n.is_empty() && !p.is_empty())
        .ok_or_else(|| usage(format!("{flag}: expected NAME=PATH, got `{spec}`")))?;
    let path = PathBuf::from(path);
    input(flag, &path)?;
    Ok((name.to_string(), path))
}

fn emit_json(out: &Output, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("results serialize");
    text.push('\n');
    match &out.out {
        Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| io_error(Path::new("<stdout>"), e)),
    }
}

fn emit_corpus(out: &Output, c: &Corpus) -> Result<()> {
    match &out.out {
        Some(path) => save_corpus(c, path).map_err(domain),
        None => write_corpus(c, std::io::stdout().lock())
            .map_err(|e| io_error(Path::new("<stdout>"), e)),
    }
}

fn decoding(
    flag: &str,
    spec: Option<&str>,
    default: DecodingSpec,
    seed: Option<u64>,
) -> Result<DecodingSpec> {
    let mut d = match spec {
        Some(s) => s
            .parse::<DecodingSpec>()
            .map_err(|e| usage(format!("{flag}: {e}")))?,
        None => default,
    };
    if d.seed.is_none() {
        d.seed = seed;
    }
    Ok(d)
}

fn backend(spec: &str, seed: Option<u64>) -> Result<Box<dyn TranslationBackend>> {
    let config = if let Some(dict) = spec.strip_prefix("mock:") {
        BackendConfig::Mock {
            dictionary: dict.into(),
            seed: seed.unwrap_or(0),
        }
    } else if spec.starts_with("http://") || spec.starts_with("https://") {
        // Built directly so the default timeout and limits stay in one place.
        return Ok(Box::new(HttpBackend::new(
            spec,
            Duration::from_secs(60),
            Default::default(),
        )));
    } else {
        let path = input("--backend", Path::new(spec))?;
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        let mut config: BackendConfig = serde_json::from_str(&text)
            .map_err(|e| usage(format!("--backend: {}: {e}", path.display())))?;
        if let (BackendConfig::Mock { seed: s, .. }, Some(seed)) = (&mut config, seed) {
            *s = seed;
        }
        config
    };
    config.build().map_err(domain)
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Roundtrip(a) => roundtrip(a),
        Command::TranslateTest(a) => translate_test(a),
        Command::Diversity(a) => diversity(a),
        Command::MtScore(a) => mt_score(a),
        Command::Detector(d) => match d {
            DetectorCommand::Train(a) => detector_train(a),
            DetectorCommand::Score(a) => detector_score(a),
            DetectorCommand::Split(a) => detector_split(a),
            DetectorCommand::Evaluate(a) => detector_evaluate(a),
        },
        Command::Fid(a) => fid(a),
        Command::FidReport(a) => fid_report(a),
        Command::Augment(a) => match a {
            AugmentCommand::Merge(a) => augment_merge(a, false),
            AugmentCommand::MergeTag(a) => augment_merge(a, true),
            AugmentCommand::Tag(a) => augment_tag(a, true),
            AugmentCommand::Untag(a) => augment_tag(a, false),
        },
        Command::GroupAccuracy(a) => group_acc(a),
        Command::Ttest(a) => ttest(a),
        Command::Report(a) => report(a),
    }
}

fn roundtrip(a: RoundtripArgs) -> Result<()> {
    let c = corpus("--in", &a.input)?;
    let fwd = decoding(
        "--fwd",
        a.fwd.as_deref(),
        DecodingSpec::roundtrip_forward(),
        a.seed,
    )?;
    let bwd = decoding(
        "--bwd",
        a.bwd.as_deref(),
        DecodingSpec::roundtrip_backward(),
        a.seed,
    )?;
    let be = backend(&a.backend, a.seed)?;
    let out = translation::roundtrip(&c, &a.pivot, be.as_ref(), &fwd, &bwd).map_err(domain)?;
    emit_corpus(&a.output, &out)
}

fn translate_test(a: TranslateTestArgs) -> Result<()> {
    let c = corpus("--in", &a.input)?;
    let lang = match a.lang {
        Some(l) => l,
        None => match c.language() {
            Ok(Some(l)) => l.to_string(),
            Ok(None) => return Err(usage("--lang: required for an empty corpus")),
            Err((x, y)) => return Err(domain(TranslationError::MixedLanguageCorpus(x, y))),
        },
    };
    let spec = decoding(
        "--decoding",
        a.decoding.as_deref(),
        DecodingSpec::translate_test(),
        a.seed,
    )?;
    let be = backend(&a.backend, a.seed)?;
    let out = translation::translate_test(&c, &lang, be.as_ref(), &spec).map_err(domain)?;
    emit_corpus(&a.output, &out)
}

fn diversity(a: DiversityArgs) -> Result<()> {
    let c = corpus("--in", &a.input)?;
    let stop = match &a.stoplist {
        Some(p) => Stoplist::load(input("--stoplist", p)?).map_err(domain)?,
        None => Stoplist::english(),
    };
    let report = corpus_diversity(&c, &stop).map_err(domain)?;
    emit_json(&a.output, &report)
}

fn read_lines(flag: &str, path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(input(flag, path)?).map_err(|e| io_error(path, e))?;
    Ok(text
        .lines()
        .map(|l| l.trim_end_matches('\r').to_string())
        .collect())
}

fn is_jsonl(p: &Path) -> bool {
    p.extension().is_some_and(|e| e == "jsonl")
}

fn mt_score(a: MtScoreArgs) -> Result<()> {
    let (hyps, refs) = if is_jsonl(&a.hyp) && is_jsonl(&a.reference) {
        let (pairs, diagnostics) =
            align(&corpus("--hyp", &a.hyp)?, &corpus("--ref", &a.reference)?);
        for d in &diagnostics {
            eprintln!("warning: id {} has no counterpart ({:?})", d.id, d.side);
        }
        pairs
            .pairs
            .into_iter()
            .map(|(h, r)| (h.text, r.text))
            .unzip()
    } else {
        (
            read_lines("--hyp", &a.hyp)?,
            read_lines("--ref", &a.reference)?,
        )
    };
    let score = match a.metric {
        MetricArg::Bleu => metrics::bleu(&hyps, &refs),
        MetricArg::Chrf => metrics::chrf(&hyps, &refs),
    }
    .map_err(domain)?;
    emit_json(&a.output, &score)
}

fn detector_train(a: TrainArgs) -> Result<()> {
    let human = corpus("--human", &a.human)?;
    let machine = corpus("--machine", &a.machine)?;
    let cfg = FeatureConfig {
        hash_dim: a.hash_dim,
        ..FeatureConfig::default()
    };
    let params = TrainParams {
        epochs: a.epochs,
        learning_rate: a.lr,
        l2: a.l2,
        seed: a.seed,
        ..TrainParams::default()
    };
    let model = detector::train(&human, &machine, &cfg, &params).map_err(domain)?;
    detector::save_model(&model, &a.model).map_err(domain)?;
    emit_json(
        &a.output,
        &json!({
            "model": a.model.display().to_string(),
            "validation_accuracy": model.validation_accuracy,
            "train_seed": model.train_seed,
            "hash_dim": model.feature_config.hash_dim,
        }),
    )
}

fn model(path: &Path) -> Result<detector::DetectorModel> {
    detector::load_model(input("--model", path)?).map_err(domain)
}

fn detector_score(a: ScoreArgs) -> Result<()> {
    let m = model(&a.model)?;
    let c = corpus("--in", &a.input)?;
    let scores: Vec<Value> = c
        .iter()
        .map(|s| json!({ "id": s.id, "score": m.score(&s.text) }))
        .collect();
    emit_json(&a.output, &json!({ "scores": scores }))
}

fn detector_split(a: SplitArgs) -> Result<()> {
    let m = model(&a.model)?;
    let c = corpus("--in", &a.input)?;
    let halves = detector::split(&m, &c).map_err(domain)?;
    save_corpus(&halves.human_like, &a.human_like).map_err(domain)?;
    save_corpus(&halves.nmt_like, &a.nmt_like).map_err(domain)?;
    if let Some(path) = &a.groups {
        let groups: BTreeMap<&str, &str> = halves
            .human_like
            .ids()
            .map(|id| (id, "human_like"))
            .chain(halves.nmt_like.ids().map(|id| (id, "nmt_like")))
            .collect();
        let text = serde_json::to_string_pretty(&groups).expect("groups serialize") + "\n";
        fs::write(path, text).map_err(|e| io_error(path, e))?;
    }
    emit_json(
        &a.output,
        &json!({
            "human_like": halves.human_like.len(),
            "nmt_like": halves.nmt_like.len(),
            "threshold_score": halves.threshold_score,
        }),
    )
}

fn detector_evaluate(a: EvaluateArgs) -> Result<()> {
    let m = model(&a.model)?;
    let human = corpus("--human", &a.human)?;
    let machine = corpus("--machine", &a.machine)?;
    let accuracy = detector::evaluate(&m, &human, &machine).map_err(domain)?;
    emit_json(&a.output, &json!({ "accuracy": accuracy }))
}

fn embeddings(flag: &str, path: &Path) -> Result<reprdist::EmbeddingSet> {
    load_embeddings(input(flag, path)?).map_err(domain)
}

fn fid(a: FidArgs) -> Result<()> {
    let x = embeddings("--a", &a.a)?;
    let y = embeddings("--b", &a.b)?;
    let r = reprdist::fid_between(&x, &y, a.eps).map_err(domain)?;
    emit_json(&a.output, &r)
}

fn fid_report(a: FidReportArgs) -> Result<()> {
    let human = embeddings("--train-human", &a.train_human)?;
    let mt = embeddings("--train-mt", &a.train_mt)?;
    let evals = a
        .evals
        .iter()
        .map(|spec| {
            let (name, path) = named_path("--eval", spec)?;
            Ok((name, embeddings("--eval", &path)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = reprdist::fid_report(&human, &mt, &evals, a.eps).map_err(domain)?;
    emit_json(&a.output, &json!({ "rows": rows }))
}

fn write_augmented(out: &Output, c: &Corpus, manifest: &AugmentManifest) -> Result<()> {
    match &out.out {
        Some(path) => {
            save_corpus(c, path).map_err(domain)?;
            manifest.save(manifest_path(path)).map_err(domain)?;
            emit_json(&Output { out: None }, manifest)
        }
        None => {
            emit_corpus(out, c)?;
            let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
            eprintln!("{text}");
            Ok(())
        }
    }
}

fn augment_merge(a: MergeArgs, tagged: bool) -> Result<()> {
    let human = corpus("--human", &a.human)?;
    let machine = corpus("--machine", &a.machine)?;
    let (out, manifest) = if tagged {
        let policy = TagPolicy::new(a.tag_token).map_err(domain)?;
        augment::merge_tag(&human, &machine, &policy)
    } else {
        augment::merge(&human, &machine)
    }
    .map_err(domain)?;
    let manifest = manifest.with_paths(&[&a.human, &a.machine]);
    write_augmented(&a.output, &out, &manifest)
}

fn augment_tag(a: TagArgs, tagging: bool) -> Result<()> {
    let c = corpus("--in", &a.input)?;
    let policy = TagPolicy::new(a.tag_token).map_err(domain)?;
    let out = if tagging {
        augment::tag(&c, &policy)
    } else {
        augment::untag(&c, &policy)
    }
    .map_err(domain)?;
    emit_corpus(&a.output, &out)
}

fn string_map(flag: &str, path: &Path) -> Result<HashMap<String, String>> {
    let text = fs::read_to_string(input(flag, path)?).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Domain {
        name: "ParseError",
        message: format!(
            "{flag}: {}: expected a JSON object of strings: {e}",
            path.display()
        ),
    })
}

fn group_acc(a: GroupAccuracyArgs) -> Result<()> {
    let preds = string_map("--pred", &a.pred)?;
    let gold = corpus("--gold", &a.gold)?;
    let groups = a
        .groups
        .as_deref()
        .map(|p| string_map("--groups", p))
        .transpose()?;
    let opts = AccuracyOptions {
        allow_missing: a.allow_missing,
    };
    let result = group_accuracy(&preds, &gold, groups.as_ref(), opts).map_err(domain)?;
    emit_json(&a.output, &result)
}

fn numbers(flag: &str, path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(input(flag, path)?).map_err(|e| io_error(path, e))?;
    let parse_error = |m: String| CliError::Domain {
        name: "ParseError",
        message: format!("{flag}: {}: {m}", path.display()),
    };
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text).map_err(|e| parse_error(e.to_string()));
    }
    text.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| parse_error(format!("`{t}` is not a number")))
        })
        .collect()
}

fn ttest(a: TtestArgs) -> Result<()> {
    let x = numbers("--a", &a.a)?;
    let y = numbers("--b", &a.b)?;
    let r = paired_t_test(&x, &y).map_err(domain)?;
    emit_json(&a.output, &r)
}

fn report(a: ReportArgs) -> Result<()> {
    let mut results = serde_json::Map::new();
    for spec in &a.parts {
        let (name, path) = named_path("--part", spec)?;
        let text = fs::read_to_string(&path).map_err(|e| io_error(&path, e))?;
        let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Domain {
            name: "ParseError",
            message: format!("--part {name}: {}: {e}", path.display()),
        })?;
        if results.insert(name.clone(), value).is_some() {
            return Err(usage(format!("--part: duplicate name `{name}`")));
        }
    }
    emit_json(
        &a.output,
        &json!({ "mtlens_version": env!("CARGO_PKG_VERSION"), "results": results }),
    )
}
