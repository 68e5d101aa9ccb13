//! Question corpora: the sample record, JSON-lines I/O and id alignment.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: malformed JSON: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("line {line}: missing field `{name}`")]
    MissingField { line: usize, name: String },
    #[error("line {line}: unknown field `{name}` (use lenient mode to ignore)")]
    UnknownField { line: usize, name: String },
    #[error("invalid sample `{id}`: {reason}")]
    InvalidSample { id: String, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CorpusError {
    pub fn name(&self) -> &'static str {
        match self {
            CorpusError::Parse { .. } => "ParseError",
            CorpusError::DuplicateId(_) => "DuplicateId",
            CorpusError::MissingField { .. } => "MissingField",
            CorpusError::UnknownField { .. } => "UnknownField",
            CorpusError::InvalidSample { .. } => "InvalidSample",
            CorpusError::Io { .. } => "IoError",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OriginKind {
    Human,
    Machine,
}

/// Who produced a text: a person, or an MT system (optionally via a pivot).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Origin {
    pub kind: OriginKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pivot: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<String>,
}

impl Origin {
    pub fn human() -> Self {
        Origin {
            kind: OriginKind::Human,
            system: None,
            pivot: None,
            direction: None,
        }
    }

    pub fn machine(
        system: impl Into<String>,
        pivot: Option<String>,
        direction: Option<String>,
    ) -> Self {
        Origin {
            kind: OriginKind::Machine,
            system: Some(system.into()),
            pivot,
            direction,
        }
    }

    pub fn is_human(&self) -> bool {
        self.kind == OriginKind::Human
    }

    fn check(&self) -> Result<(), String> {
        match self.kind {
            OriginKind::Human => {
                if self.system.is_some() || self.pivot.is_some() || self.direction.is_some() {
                    return Err("human origin must not carry system, pivot or direction".into());
                }
            }
            OriginKind::Machine => {
                if self.system.as_deref().is_none_or(str::is_empty) {
                    return Err("machine origin requires a system".into());
                }
            }
        }
        Ok(())
    }
}

/// One question record. Field order here is the canonical serialization order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_id: Option<String>,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer: Option<String>,
    pub language: String,
    pub origin: Origin,
    #[serde(default)]
    pub tags: Vec<String>,
}

const SAMPLE_KEYS: [&str; 7] = [
    "id", "image_id", "text", "answer", "language", "origin", "tags",
];
const REQUIRED_KEYS: [&str; 4] = ["id", "text", "language", "origin"];

impl Sample {
    /// A human-written sample with no image or answer attached.
    pub fn human(
        id: impl Into<String>,
        text: impl Into<String>,
        language: impl Into<String>,
    ) -> Self {
        Sample {
            id: id.into(),
            image_id: None,
            text: text.into(),
            answer: None,
            language: language.into(),
            origin: Origin::human(),
            tags: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let invalid = |reason: String| CorpusError::InvalidSample {
            id: self.id.clone(),
            reason,
        };
        if self.id.is_empty() {
            return Err(invalid("id is empty".into()));
        }
        if self.text.trim().is_empty() {
            return Err(invalid("text is empty".into()));
        }
        if !is_language_code(&self.language) {
            return Err(invalid(format!(
                "language `{}` is not a 2-3 letter lowercase code",
                self.language
            )));
        }
        self.origin.check().map_err(invalid)
    }
}

/// Shape check only: `[a-z]{2,3}`.
pub fn is_language_code(code: &str) -> bool {
    (2..=3).contains(&code.len()) && code.bytes().all(|b| b.is_ascii_lowercase())
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub samples: Vec<Sample>,
    pub meta: BTreeMap<String, String>,
}

impl Corpus {
    /// Builds a corpus, checking every sample and id uniqueness.
    pub fn new(samples: Vec<Sample>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(samples.len());
        for s in &samples {
            s.validate()?;
            if !seen.insert(s.id.as_str()) {
                return Err(CorpusError::DuplicateId(s.id.clone()));
            }
        }
        Ok(Corpus {
            samples,
            meta: BTreeMap::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Sample> {
        self.samples.iter()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.samples.iter().map(|s| s.id.as_str())
    }

    pub fn texts(&self) -> Vec<&str> {
        self.samples.iter().map(|s| s.text.as_str()).collect()
    }

    /// The single language shared by every sample, `Ok(None)` for an empty
    /// corpus, or both differing codes.
    pub fn language(&self) -> Result<Option<&str>, (String, String)> {
        let mut iter = self.samples.iter();
        let Some(first) = iter.next() else {
            return Ok(None);
        };
        for s in iter {
            if s.language != first.language {
                return Err((first.language.clone(), s.language.clone()));
            }
        }
        Ok(Some(first.language.as_str()))
    }

    pub fn get(&self, id: &str) -> Option<&Sample> {
        self.samples.iter().find(|s| s.id == id)
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a Sample;
    type IntoIter = std::slice::Iter<'a, Sample>;

    fn into_iter(self) -> Self::IntoIter {
        self.samples.iter()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Ignore unknown keys and default a missing `origin` to human.
    pub lenient: bool,
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    load_corpus_with(path, LoadOptions::default())
}

pub fn load_corpus_with(path: impl AsRef<Path>, opts: LoadOptions) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let io_err = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io_err)?;
    read_corpus(BufReader::new(file), opts).map_err(|e| match e {
        CorpusError::Io { source, .. } => io_err(source),
        other => other,
    })
}

/// Parses JSON-lines from any reader. Blank lines are skipped.
pub fn read_corpus(reader: impl BufRead, opts: LoadOptions) -> Result<Corpus, CorpusError> {
    let mut samples = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| CorpusError::Io {
            path: PathBuf::new(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let sample = parse_line(&line, line_no, opts)?;
        sample.validate()?;
        if !seen.insert(sample.id.clone()) {
            return Err(CorpusError::DuplicateId(sample.id));
        }
        samples.push(sample);
    }
    Ok(Corpus {
        samples,
        meta: BTreeMap::new(),
    })
}

fn parse_line(line: &str, line_no: usize, opts: LoadOptions) -> Result<Sample, CorpusError> {
    let parse_err = |message: String| CorpusError::Parse {
        line: line_no,
        message,
    };
    let value: Value = serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
    let Value::Object(mut obj) = value else {
        return Err(parse_err("expected a JSON object".into()));
    };
    if opts.lenient {
        obj.retain(|k, _| SAMPLE_KEYS.contains(&k.as_str()));
        obj.entry("origin")
            .or_insert_with(|| serde_json::json!({"kind": "human"}));
    } else if let Some(unknown) = obj.keys().find(|k| !SAMPLE_KEYS.contains(&k.as_str())) {
        return Err(CorpusError::UnknownField {
            line: line_no,
            name: unknown.clone(),
        });
    }
    check_required(&obj, line_no)?;
    serde_json::from_value(Value::Object(obj)).map_err(|e| parse_err(e.to_string()))
}

fn check_required(obj: &Map<String, Value>, line_no: usize) -> Result<(), CorpusError> {
    match REQUIRED_KEYS.iter().find(|k| !obj.contains_key(**k)) {
        Some(name) => Err(CorpusError::MissingField {
            line: line_no,
            name: (*name).to_string(),
        }),
        None => Ok(()),
    }
}

/// Canonical single-line JSON for one sample (fixed key order, no whitespace).
pub fn sample_to_line(sample: &Sample) -> String {
    serde_json::to_string(sample).expect("sample serialization is infallible")
}

pub fn write_corpus(corpus: &Corpus, mut writer: impl Write) -> std::io::Result<()> {
    for s in &corpus.samples {
        writer.write_all(sample_to_line(s).as_bytes())?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

pub fn save_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let io_err = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_corpus(corpus, BufWriter::new(file)).map_err(io_err)
}

/// Samples paired by id across two corpora.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParallelCorpus {
    pub pairs: Vec<(Sample, Sample)>,
}

impl ParallelCorpus {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    LeftOnly,
    RightOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlignDiagnostic {
    pub id: String,
    pub side: Side,
}

/// Pairs samples sharing an id, in `left` order. Unmatched ids are reported
/// (left-only in left order, then right-only in right order).
pub fn align(left: &Corpus, right: &Corpus) -> (ParallelCorpus, Vec<AlignDiagnostic>) {
    let right_by_id: HashMap<&str, &Sample> =
        right.samples.iter().map(|s| (s.id.as_str(), s)).collect();
    let mut pairs = Vec::new();
    let mut diagnostics = Vec::new();
    let mut matched: HashSet<&str> = HashSet::new();
    for l in &left.samples {
        match right_by_id.get(l.id.as_str()) {
            Some(r) => {
                matched.insert(l.id.as_str());
                pairs.push((l.clone(), (*r).clone()));
            }
            None => diagnostics.push(AlignDiagnostic {
                id: l.id.clone(),
                side: Side::LeftOnly,
            }),
        }
    }
    for r in &right.samples {
        if !matched.contains(r.id.as_str()) {
            diagnostics.push(AlignDiagnostic {
                id: r.id.clone(),
                side: Side::RightOnly,
            });
        }
    }
    (ParallelCorpus { pairs }, diagnostics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn read(text: &str) -> Result<Corpus, CorpusError> {
        read_corpus(Cursor::new(text), LoadOptions::default())
    }

    fn corpus_of(ids: &[&str]) -> Corpus {
        Corpus::new(
            ids.iter()
                .map(|id| Sample::human(*id, format!("question {id}"), "en"))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn reads_lines_in_order() {
        let c = read(concat!(
            r#"{"id":"b","text":"Is it red?","language":"en","origin":{"kind":"human"},"tags":[]}"#,
            "\n",
            r#"{"id":"a","text":"Is it blue?","language":"en","origin":{"kind":"human"}}"#,
            "\n"
        ))
        .unwrap();
        assert_eq!(c.ids().collect::<Vec<_>>(), ["b", "a"]);
        assert!(c.samples[1].tags.is_empty());
    }

    #[test]
    fn duplicate_id_is_rejected() {
        let line = |id: &str| {
            format!(r#"{{"id":"{id}","text":"x?","language":"en","origin":{{"kind":"human"}}}}"#)
        };
        let text = [line("q1"), line("q2"), line("q1")].join("\n");
        match read(&text) {
            Err(CorpusError::DuplicateId(id)) => assert_eq!(id, "q1"),
            other => panic!("expected DuplicateId, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_reports_line() {
        let text = "{\"id\":\"q1\",\"text\":\"x\",\"language\":\"en\",\"origin\":{\"kind\":\"human\"}}\n{oops\n";
        match read(text) {
            Err(CorpusError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected ParseError, got {other:?}"),
        }
    }

    #[test]
    fn missing_field_is_named() {
        match read(r#"{"id":"q1","language":"en","origin":{"kind":"human"}}"#) {
            Err(CorpusError::MissingField { name, line }) => {
                assert_eq!(name, "text");
                assert_eq!(line, 1);
            }
            other => panic!("expected MissingField, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_strict_vs_lenient() {
        let line = r#"{"id":"q1","text":"x?","language":"en","full_answer":"yes","split":"dev"}"#;
        assert!(matches!(read(line), Err(CorpusError::UnknownField { .. })));
        let c = read_corpus(Cursor::new(line), LoadOptions { lenient: true }).unwrap();
        assert_eq!(c.samples[0].origin, Origin::human());
    }

    #[test]
    fn origin_invariants() {
        let mut s = Sample::human("q", "Is it?", "en");
        s.origin.system = Some("nllb".into());
        assert!(s.validate().is_err());
        s.origin = Origin {
            kind: OriginKind::Machine,
            system: None,
            pivot: None,
            direction: None,
        };
        assert!(s.validate().is_err());
        s.origin = Origin::machine("nllb", Some("de".into()), Some("en-de-en".into()));
        assert!(s.validate().is_ok());
    }

    #[test]
    fn language_shape() {
        assert!(is_language_code("en"));
        assert!(is_language_code("ben"));
        assert!(!is_language_code("EN"));
        assert!(!is_language_code("e"));
        assert!(!is_language_code("engl"));
        assert!(!is_language_code("zh-cn"));
    }

    #[test]
    fn blank_text_is_invalid() {
        let err = Corpus::new(vec![Sample::human("q", "   ", "en")]).unwrap_err();
        assert_eq!(err.name(), "InvalidSample");
    }

    #[test]
    fn canonical_key_order() {
        let mut s = Sample::human("202552", "Are these animals all the same species?", "en");
        s.image_id = Some("n161313".into());
        s.answer = Some("yes".into());
        assert_eq!(
            sample_to_line(&s),
            r#"{"id":"202552","image_id":"n161313","text":"Are these animals all the same species?","answer":"yes","language":"en","origin":{"kind":"human"},"tags":[]}"#
        );
        s.tags.push("[MT]".into());
        s.origin = Origin::machine("mock", Some("de".into()), Some("en-de-en".into()));
        let line = sample_to_line(&s);
        assert!(line.ends_with(r#""origin":{"kind":"machine","system":"mock","pivot":"de","direction":"en-de-en"},"tags":["[MT]"]}"#));
    }

    #[test]
    fn empty_corpus_writes_nothing() {
        let mut buf = Vec::new();
        write_corpus(&Corpus::default(), &mut buf).unwrap();
        assert!(buf.is_empty());
    }

    #[test]
    fn non_ascii_is_written_raw() {
        let c = Corpus::new(vec![Sample::human(
            "k1",
            "이 동물들은 같은 종인가요?",
            "ko",
        )])
        .unwrap();
        let mut buf = Vec::new();
        write_corpus(&c, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("이 동물들은"));
        assert!(text.ends_with("}\n"));
    }

    #[test]
    fn align_partial() {
        let a = corpus_of(&["1", "2", "3"]);
        let b = corpus_of(&["2", "3", "4"]);
        let (pc, diag) = align(&a, &b);
        let ids: Vec<_> = pc.pairs.iter().map(|(l, _)| l.id.as_str()).collect();
        assert_eq!(ids, ["2", "3"]);
        assert!(pc.pairs.iter().all(|(l, r)| l.id == r.id));
        assert_eq!(
            diag,
            vec![
                AlignDiagnostic {
                    id: "1".into(),
                    side: Side::LeftOnly
                },
                AlignDiagnostic {
                    id: "4".into(),
                    side: Side::RightOnly
                },
            ]
        );
    }

    #[test]
    fn align_identity_and_empty() {
        let c = corpus_of(&["x", "y", "z"]);
        assert_eq!(align(&c, &c).0.len(), 3);
        let (pc, diag) = align(&Corpus::default(), &c);
        assert!(pc.is_empty());
        assert_eq!(diag.len(), 3);
    }
}
