//! Backend-agnostic translation orchestration.
//!
//! Every MT system sits behind [`TranslationBackend`]. The orchestrator splits
//! work into batches of at most `max_batch` texts, keeps at most
//! `max_in_flight` batches outstanding, and reassembles results in input
//! order. [`roundtrip`] and [`translate_test`] build the two corpus-level
//! pipelines on top of [`translate`].

mod http;
mod mock;

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Origin, Sample};

pub use http::HttpBackend;
pub use mock::{load_dictionary, MockBackend, PIVOT_MARK};

/// Nucleus mass for the forward leg of a round trip.
pub const RT_FORWARD_TOP_P: f64 = 0.9;
/// Beam width for the backward leg of a round trip.
pub const RT_BACKWARD_BEAM: u32 = 5;
/// Maximum repeated n-gram size, both round-trip legs.
pub const RT_NO_REPEAT_NGRAM: u32 = 5;
/// Beam width when translating evaluation sets into English.
pub const TRANSLATE_TEST_BEAM: u32 = 4;
pub const DEFAULT_MAX_TOKENS: u32 = 128;
/// Language every translate-test set is translated into.
pub const TRANSLATE_TEST_TARGET: &str = "en";

#[derive(Debug, Error)]
pub enum TranslationError {
    #[error("empty batch")]
    EmptyBatch,
    #[error("source and target language are both `{0}`")]
    SameLanguage(String),
    #[error("corpus mixes languages `{0}` and `{1}`")]
    MixedLanguageCorpus(String, String),
    #[error("corpus language `{found}` does not match declared `{expected}`")]
    LanguageMismatch { expected: String, found: String },
    #[error("invalid decoding spec: {0}")]
    InvalidDecoding(String),
    #[error("invalid backend config: {0}")]
    InvalidConfig(String),
    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("backend protocol error: {0}")]
    BackendProtocolError(String),
    #[error("backend timed out: {0}")]
    Timeout(String),
    #[error("mock dictionary not found: {}", .0.display())]
    DictionaryMissing(PathBuf),
    #[error("mock dictionary {}: {message}", path.display())]
    DictionaryInvalid { path: PathBuf, message: String },
}

impl TranslationError {
    pub fn name(&self) -> &'static str {
        match self {
            TranslationError::EmptyBatch => "EmptyBatch",
            TranslationError::SameLanguage(_) => "SameLanguage",
            TranslationError::MixedLanguageCorpus(..) => "MixedLanguageCorpus",
            TranslationError::LanguageMismatch { .. } => "LanguageMismatch",
            TranslationError::InvalidDecoding(_) => "InvalidDecoding",
            TranslationError::InvalidConfig(_) => "InvalidConfig",
            TranslationError::BackendUnavailable(_) => "BackendUnavailable",
            TranslationError::BackendProtocolError(_) => "BackendProtocolError",
            TranslationError::Timeout(_) => "Timeout",
            TranslationError::DictionaryMissing(_) => "DictionaryMissing",
            TranslationError::DictionaryInvalid { .. } => "DictionaryInvalid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Strategy {
    Beam { size: u32 },
    Nucleus { p: f64 },
}

/// How a backend should decode: search strategy plus generation limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodingSpec {
    pub strategy: Strategy,
    /// 0 disables the constraint.
    pub no_repeat_ngram: u32,
    pub max_tokens: u32,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl DecodingSpec {
    pub fn beam(size: u32) -> Self {
        DecodingSpec {
            strategy: Strategy::Beam { size },
            no_repeat_ngram: 0,
            max_tokens: DEFAULT_MAX_TOKENS,
            seed: None,
        }
    }

    pub fn nucleus(p: f64) -> Self {
        DecodingSpec {
            strategy: Strategy::Nucleus { p },
            no_repeat_ngram: 0,
            max_tokens: DEFAULT_MAX_TOKENS,
            seed: None,
        }
    }

    pub fn with_no_repeat_ngram(mut self, n: u32) -> Self {
        self.no_repeat_ngram = n;
        self
    }

    pub fn with_max_tokens(mut self, n: u32) -> Self {
        self.max_tokens = n;
        self
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    /// Forward (source to pivot) leg of a round trip.
    pub fn roundtrip_forward() -> Self {
        Self::nucleus(RT_FORWARD_TOP_P).with_no_repeat_ngram(RT_NO_REPEAT_NGRAM)
    }

    /// Backward (pivot to source) leg of a round trip.
    pub fn roundtrip_backward() -> Self {
        Self::beam(RT_BACKWARD_BEAM).with_no_repeat_ngram(RT_NO_REPEAT_NGRAM)
    }

    pub fn translate_test() -> Self {
        Self::beam(TRANSLATE_TEST_BEAM)
    }

    pub fn validate(&self) -> Result<(), TranslationError> {
        match self.strategy {
            Strategy::Beam { size: 0 } => {
                return Err(TranslationError::InvalidDecoding(
                    "beam size must be >= 1".into(),
                ))
            }
            Strategy::Nucleus { p } if !(p > 0.0 && p <= 1.0) => {
                return Err(TranslationError::InvalidDecoding(format!(
                    "nucleus p must be in (0, 1], got {p}"
                )))
            }
            _ => {}
        }
        if self.max_tokens == 0 {
            return Err(TranslationError::InvalidDecoding(
                "max_tokens must be >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self.strategy, Strategy::Nucleus { .. })
    }
}

/// Parses `beam:5` or `nucleus:0.9`, optionally followed by
/// `,no_repeat=N`, `,max_tokens=N` and `,seed=N`.
impl std::str::FromStr for DecodingSpec {
    type Err = TranslationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |m: String| TranslationError::InvalidDecoding(m);
        let mut parts = s.split(',').map(str::trim);
        let head = parts.next().unwrap_or_default();
        let (kind, param) = head
            .split_once(':')
            .ok_or_else(|| bad(format!("expected `beam:N` or `nucleus:P`, got `{head}`")))?;
        let mut spec = match kind {
            "beam" => Self::beam(
                param
                    .parse()
                    .map_err(|_| bad(format!("bad beam size `{param}`")))?,
            ),
            "nucleus" => Self::nucleus(
                param
                    .parse()
                    .map_err(|_| bad(format!("bad nucleus p `{param}`")))?,
            ),
            other => return Err(bad(format!("unknown strategy `{other}`"))),
        };
        for kv in parts {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got `{kv}`")))?;
            let num = || {
                v.parse::<u64>()
                    .map_err(|_| bad(format!("bad value for `{k}`: `{v}`")))
            };
            match k {
                "no_repeat" | "no_repeat_ngram" => spec.no_repeat_ngram = num()? as u32,
                "max_tokens" => spec.max_tokens = num()? as u32,
                "seed" => spec.seed = Some(num()?),
                other => return Err(bad(format!("unknown decoding option `{other}`"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationRequest {
    pub texts: Vec<String>,
    pub source: String,
    pub target: String,
    pub decoding: DecodingSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationResponse {
    pub translations: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchLimits {
    pub max_batch: usize,
    pub max_in_flight: usize,
}

impl Default for BatchLimits {
    fn default() -> Self {
        BatchLimits {
            max_batch: 32,
            max_in_flight: 4,
        }
    }
}

/// Anything that can translate a batch. Implementations must be reentrant:
/// the orchestrator calls `translate_batch` from several threads at once.
pub trait TranslationBackend: Send + Sync {
    /// Recorded as `origin.system` on translated samples.
    fn id(&self) -> &str;

    fn limits(&self) -> BatchLimits {
        BatchLimits::default()
    }

    fn translate_batch(
        &self,
        request: &TranslationRequest,
    ) -> Result<TranslationResponse, TranslationError>;
}

fn default_timeout() -> u64 {
    60
}
fn default_max_batch() -> usize {
    32
}
fn default_in_flight() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BackendConfig {
    Http {
        endpoint: String,
        #[serde(default = "default_timeout")]
        timeout_secs: u64,
        #[serde(default = "default_max_batch")]
        max_batch: usize,
        #[serde(default = "default_in_flight")]
        max_in_flight: usize,
    },
    Mock {
        dictionary: PathBuf,
        #[serde(default)]
        seed: u64,
    },
}

impl BackendConfig {
    pub fn validate(&self) -> Result<(), TranslationError> {
        if let BackendConfig::Http {
            max_batch,
            max_in_flight,
            endpoint,
            ..
        } = self
        {
            if *max_batch == 0 || *max_in_flight == 0 {
                return Err(TranslationError::InvalidConfig(
                    "max_batch and max_in_flight must be >= 1".into(),
                ));
            }
            if endpoint.is_empty() {
                return Err(TranslationError::InvalidConfig("endpoint is empty".into()));
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Box<dyn TranslationBackend>, TranslationError> {
        self.validate()?;
        Ok(match self {
            BackendConfig::Http {
                endpoint,
                timeout_secs,
                max_batch,
                max_in_flight,
            } => Box::new(HttpBackend::new(
                endpoint.clone(),
                Duration::from_secs(*timeout_secs),
                BatchLimits {
                    max_batch: *max_batch,
                    max_in_flight: *max_in_flight,
                },
            )),
            BackendConfig::Mock { dictionary, seed } => {
                Box::new(MockBackend::from_file(dictionary, *seed)?)
            }
        })
    }
}

/// Translates `texts`, preserving length and order. Empty strings are never
/// sent to the backend and come back empty.
type ChunkResult = Result<Vec<String>, TranslationError>;

pub fn translate(
    backend: &dyn TranslationBackend,
    texts: &[String],
    source: &str,
    target: &str,
    spec: &DecodingSpec,
) -> Result<Vec<String>, TranslationError> {
    if texts.is_empty() {
        return Err(TranslationError::EmptyBatch);
    }
    if source == target {
        return Err(TranslationError::SameLanguage(source.to_string()));
    }
    spec.validate()?;

    let pending: Vec<usize> = (0..texts.len()).filter(|&i| !texts[i].is_empty()).collect();
    let mut out = vec![String::new(); texts.len()];
    if pending.is_empty() {
        return Ok(out);
    }

    let limits = backend.limits();
    let chunks: Vec<&[usize]> = pending.chunks(limits.max_batch.max(1)).collect();
    let results: Mutex<Vec<Option<ChunkResult>>> =
        Mutex::new((0..chunks.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = limits.max_in_flight.max(1).min(chunks.len());

    let run_chunk = |idx: usize| {
        let chunk = chunks[idx];
        let request = TranslationRequest {
            texts: chunk.iter().map(|&i| texts[i].clone()).collect(),
            source: source.to_string(),
            target: target.to_string(),
            decoding: *spec,
        };
        let result = backend.translate_batch(&request).and_then(|resp| {
            if resp.translations.len() == chunk.len() {
                Ok(resp.translations)
            } else {
                Err(TranslationError::BackendProtocolError(format!(
                    "sent {} texts, received {} translations",
                    chunk.len(),
                    resp.translations.len()
                )))
            }
        });
        results.lock().unwrap()[idx] = Some(result);
    };

    if workers == 1 {
        (0..chunks.len()).for_each(run_chunk);
    } else {
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let idx = next.fetch_add(1, Ordering::Relaxed);
                    if idx >= chunks.len() {
                        break;
                    }
                    run_chunk(idx);
                });
            }
        });
    }

    // Reassemble in chunk order; the first failing chunk wins.
    for (chunk, result) in chunks.iter().zip(results.into_inner().unwrap()) {
        let translations = result.expect("every chunk is processed")?;
        for (&i, t) in chunk.iter().zip(translations) {
            out[i] = t;
        }
    }
    Ok(out)
}

fn corpus_language(corpus: &Corpus) -> Result<Option<String>, TranslationError> {
    corpus
        .language()
        .map(|l| l.map(str::to_string))
        .map_err(|(a, b)| TranslationError::MixedLanguageCorpus(a, b))
}

fn with_texts(corpus: &Corpus, texts: Vec<String>, edit: impl Fn(&mut Sample)) -> Corpus {
    let samples = corpus
        .samples
        .iter()
        .zip(texts)
        .map(|(s, text)| {
            let mut s = s.clone();
            s.text = text;
            edit(&mut s);
            s
        })
        .collect();
    Corpus {
        samples,
        meta: corpus.meta.clone(),
    }
}

/// Round-trip translation through `pivot`. Only `text` and `origin` change.
pub fn roundtrip(
    corpus: &Corpus,
    pivot: &str,
    backend: &dyn TranslationBackend,
    forward: &DecodingSpec,
    backward: &DecodingSpec,
) -> Result<Corpus, TranslationError> {
    let Some(lang) = corpus_language(corpus)? else {
        return Ok(corpus.clone());
    };
    if lang == pivot {
        return Err(TranslationError::SameLanguage(lang));
    }
    let texts: Vec<String> = corpus.samples.iter().map(|s| s.text.clone()).collect();
    let there = translate(backend, &texts, &lang, pivot, forward)?;
    let back = translate(backend, &there, pivot, &lang, backward)?;
    let origin = Origin::machine(
        backend.id(),
        Some(pivot.to_string()),
        Some(format!("{lang}-{pivot}-{lang}")),
    );
    Ok(with_texts(corpus, back, |s| s.origin = origin.clone()))
}

/// Translates an evaluation corpus written in `corpus_language` into English.
pub fn translate_test(
    corpus: &Corpus,
    corpus_language_code: &str,
    backend: &dyn TranslationBackend,
    spec: &DecodingSpec,
) -> Result<Corpus, TranslationError> {
    if corpus_language_code == TRANSLATE_TEST_TARGET {
        return Err(TranslationError::SameLanguage(
            corpus_language_code.to_string(),
        ));
    }
    let Some(lang) = corpus_language(corpus)? else {
        return Ok(corpus.clone());
    };
    if lang != corpus_language_code {
        return Err(TranslationError::LanguageMismatch {
            expected: corpus_language_code.to_string(),
            found: lang,
        });
    }
    let texts: Vec<String> = corpus.samples.iter().map(|s| s.text.clone()).collect();
    let english = translate(backend, &texts, &lang, TRANSLATE_TEST_TARGET, spec)?;
    let origin = Origin::machine(
        backend.id(),
        None,
        Some(format!("{lang}-{TRANSLATE_TEST_TARGET}")),
    );
    Ok(with_texts(corpus, english, |s| {
        s.language = TRANSLATE_TEST_TARGET.to_string();
        s.origin = origin.clone();
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::OriginKind;
    use std::collections::BTreeMap;
    use std::sync::atomic::AtomicUsize;

    /// Echoes `target:text`, records the largest batch and concurrency seen.
    struct Recorder {
        limits: BatchLimits,
        in_flight: AtomicUsize,
        peak: AtomicUsize,
        largest_batch: AtomicUsize,
        calls: AtomicUsize,
    }

    impl Recorder {
        fn new(max_batch: usize, max_in_flight: usize) -> Self {
            Recorder {
                limits: BatchLimits {
                    max_batch,
                    max_in_flight,
                },
                in_flight: AtomicUsize::new(0),
                peak: AtomicUsize::new(0),
                largest_batch: AtomicUsize::new(0),
                calls: AtomicUsize::new(0),
            }
        }
    }

    impl TranslationBackend for Recorder {
        fn id(&self) -> &str {
            "recorder"
        }
        fn limits(&self) -> BatchLimits {
            self.limits
        }
        fn translate_batch(
            &self,
            req: &TranslationRequest,
        ) -> Result<TranslationResponse, TranslationError> {
            let now = self.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
            self.peak.fetch_max(now, Ordering::SeqCst);
            self.largest_batch
                .fetch_max(req.texts.len(), Ordering::SeqCst);
            self.calls.fetch_add(1, Ordering::SeqCst);
            std::thread::sleep(Duration::from_millis(2));
            self.in_flight.fetch_sub(1, Ordering::SeqCst);
            Ok(TranslationResponse {
                translations: req
                    .texts
                    .iter()
                    .map(|t| format!("{}:{t}", req.target))
                    .collect(),
            })
        }
    }

    struct ShortChanger;

    impl TranslationBackend for ShortChanger {
        fn id(&self) -> &str {
            "short"
        }
        fn translate_batch(
            &self,
            req: &TranslationRequest,
        ) -> Result<TranslationResponse, TranslationError> {
            Ok(TranslationResponse {
                translations: req.texts.iter().skip(1).cloned().collect(),
            })
        }
    }

    fn mock() -> MockBackend {
        let dict: BTreeMap<String, String> = [("numerous", "many"), ("species", "kind")]
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        MockBackend::new(dict, 7)
    }

    fn en_corpus() -> Corpus {
        let mut samples = vec![
            Sample::human("q1", "Are numerous birds flying?", "en"),
            Sample::human("q2", "What species is the animal?", "en"),
            Sample::human("q3", "Is the cat black?", "en"),
        ];
        samples[0].image_id = Some("img1".into());
        samples[0].answer = Some("yes".into());
        Corpus::new(samples).unwrap()
    }

    #[test]
    fn appendix_defaults() {
        let f = DecodingSpec::roundtrip_forward();
        assert_eq!(f.strategy, Strategy::Nucleus { p: 0.9 });
        assert_eq!(f.no_repeat_ngram, 5);
        let b = DecodingSpec::roundtrip_backward();
        assert_eq!(b.strategy, Strategy::Beam { size: 5 });
        assert_eq!(b.no_repeat_ngram, 5);
        assert_eq!(
            DecodingSpec::translate_test().strategy,
            Strategy::Beam { size: 4 }
        );
        assert_eq!(f.max_tokens, 128);
    }

    #[test]
    fn parse_decoding_spec() {
        let s: DecodingSpec = "nucleus:0.9,no_repeat=5,seed=3".parse().unwrap();
        assert_eq!(s.strategy, Strategy::Nucleus { p: 0.9 });
        assert_eq!(s.no_repeat_ngram, 5);
        assert_eq!(s.seed, Some(3));
        let b: DecodingSpec = "beam:4,max_tokens=64".parse().unwrap();
        assert_eq!(b, DecodingSpec::beam(4).with_max_tokens(64));
        assert!("beam:0".parse::<DecodingSpec>().is_err());
        assert!("nucleus:1.5".parse::<DecodingSpec>().is_err());
        assert!("nucleus:0".parse::<DecodingSpec>().is_err());
        assert!("greedy:1".parse::<DecodingSpec>().is_err());
        assert!("beam:2,width=3".parse::<DecodingSpec>().is_err());
    }

    #[test]
    fn decoding_spec_wire_shape() {
        let json = serde_json::to_value(DecodingSpec::roundtrip_forward()).unwrap();
        assert_eq!(
            json,
            serde_json::json!({
                "strategy": {"kind": "nucleus", "p": 0.9},
                "no_repeat_ngram": 5,
                "max_tokens": 128,
                "seed": null
            })
        );
    }

    #[test]
    fn empty_batch_is_an_error() {
        let err = translate(&mock(), &[], "en", "de", &DecodingSpec::beam(1)).unwrap_err();
        assert!(matches!(err, TranslationError::EmptyBatch));
    }

    #[test]
    fn same_language_is_an_error() {
        let err =
            translate(&mock(), &["x".into()], "en", "en", &DecodingSpec::beam(1)).unwrap_err();
        assert!(matches!(err, TranslationError::SameLanguage(_)));
    }

    #[test]
    fn order_and_length_preserved_across_batches() {
        let backend = Recorder::new(3, 4);
        let texts: Vec<String> = (0..50).map(|i| format!("<{i}>")).collect();
        let out = translate(&backend, &texts, "en", "de", &DecodingSpec::beam(1)).unwrap();
        assert_eq!(out.len(), 50);
        for (i, t) in out.iter().enumerate() {
            assert_eq!(t, &format!("de:<{i}>"));
        }
        assert!(backend.largest_batch.load(Ordering::SeqCst) <= 3);
        assert!(backend.peak.load(Ordering::SeqCst) <= 4);
        assert_eq!(backend.calls.load(Ordering::SeqCst), 17);
    }

    #[test]
    fn in_flight_bound_of_one_is_sequential() {
        let backend = Recorder::new(2, 1);
        let texts: Vec<String> = (0..9).map(|i| i.to_string()).collect();
        translate(&backend, &texts, "en", "de", &DecodingSpec::beam(1)).unwrap();
        assert_eq!(backend.peak.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn empty_strings_bypass_backend() {
        let backend = Recorder::new(8, 2);
        let texts = vec!["".to_string(), "a".into(), "".into()];
        let out = translate(&backend, &texts, "en", "de", &DecodingSpec::beam(1)).unwrap();
        assert_eq!(out, ["", "de:a", ""]);
        assert_eq!(backend.largest_batch.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn short_response_is_protocol_error() {
        let texts = vec!["a".to_string(), "b".into()];
        let err = translate(&ShortChanger, &texts, "en", "de", &DecodingSpec::beam(1)).unwrap_err();
        assert!(matches!(err, TranslationError::BackendProtocolError(_)));
    }

    #[test]
    fn roundtrip_metadata_contract() {
        let c = en_corpus();
        let rt = roundtrip(
            &c,
            "de",
            &mock(),
            &DecodingSpec::roundtrip_forward(),
            &DecodingSpec::roundtrip_backward(),
        )
        .unwrap();
        assert_eq!(rt.len(), c.len());
        for (a, b) in c.iter().zip(rt.iter()) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.image_id, b.image_id);
            assert_eq!(a.answer, b.answer);
            assert_eq!(a.language, b.language);
            assert_eq!(a.tags, b.tags);
            assert_eq!(b.origin.kind, OriginKind::Machine);
            assert_eq!(b.origin.system.as_deref(), Some("mock"));
            assert_eq!(b.origin.pivot.as_deref(), Some("de"));
            assert_eq!(b.origin.direction.as_deref(), Some("en-de-en"));
        }
        assert_eq!(rt.samples[0].text, "are many birds flying?");
        assert_eq!(rt.samples[1].text, "what kind is the animal?");
    }

    #[test]
    fn roundtrip_empty_and_errors() {
        let fwd = DecodingSpec::roundtrip_forward();
        let bwd = DecodingSpec::roundtrip_backward();
        assert!(roundtrip(&Corpus::default(), "de", &mock(), &fwd, &bwd)
            .unwrap()
            .is_empty());
        assert!(matches!(
            roundtrip(&en_corpus(), "en", &mock(), &fwd, &bwd),
            Err(TranslationError::SameLanguage(_))
        ));
        let mixed = Corpus::new(vec![
            Sample::human("a", "one?", "en"),
            Sample::human("b", "zwei?", "de"),
        ])
        .unwrap();
        assert!(matches!(
            roundtrip(&mixed, "fr", &mock(), &fwd, &bwd),
            Err(TranslationError::MixedLanguageCorpus(..))
        ));
    }

    #[test]
    fn translate_test_metadata() {
        let ko = Corpus::new(vec![
            Sample::human("k1", "이 동물들은 같은 종인가요?", "ko"),
            Sample::human("k2", "하늘은 파란색인가요?", "ko"),
        ])
        .unwrap();
        let en = translate_test(&ko, "ko", &mock(), &DecodingSpec::translate_test()).unwrap();
        assert_eq!(en.len(), 2);
        for s in &en {
            assert_eq!(s.language, "en");
            assert_eq!(s.origin.direction.as_deref(), Some("ko-en"));
            assert_eq!(s.origin.pivot, None);
            assert!(s.validate().is_ok());
        }
        assert!(matches!(
            translate_test(&ko, "ja", &mock(), &DecodingSpec::translate_test()),
            Err(TranslationError::LanguageMismatch { .. })
        ));
    }

    #[test]
    fn translate_test_rejects_english() {
        assert!(matches!(
            translate_test(&en_corpus(), "en", &mock(), &DecodingSpec::translate_test()),
            Err(TranslationError::SameLanguage(_))
        ));
    }

    #[test]
    fn backend_config_validation() {
        let bad = BackendConfig::Http {
            endpoint: "http://localhost:1".into(),
            timeout_secs: 1,
            max_batch: 0,
            max_in_flight: 1,
        };
        assert!(bad.validate().is_err());
        let missing = BackendConfig::Mock {
            dictionary: "/nonexistent/dict.json".into(),
            seed: 0,
        };
        assert!(matches!(
            missing.build().err().unwrap(),
            TranslationError::DictionaryMissing(_)
        ));
        let parsed: BackendConfig =
            serde_json::from_str(r#"{"kind":"http","endpoint":"http://x"}"#).unwrap();
        assert_eq!(
            parsed,
            BackendConfig::Http {
                endpoint: "http://x".into(),
                timeout_secs: 60,
                max_batch: 32,
                max_in_flight: 4
            }
        );
    }
}
