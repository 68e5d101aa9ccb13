//! Deterministic stand-in for an MT system.
//!
//! Forward (into a pivot): lowercase, reverse token order, prefix each token
//! with [`PIVOT_MARK`]. Backward (a marked text back out): strip the marks,
//! restore order, replace words through a simplification dictionary and
//! collapse whitespace. The dictionary lexically flattens the text the way
//! real round trips tend to, so detectors and diversity metrics have a signal
//! to find.
//!
//! Under beam decoding every dictionary hit is substituted. Under nucleus
//! decoding each hit is substituted with probability `p`, decided by a seeded
//! hash of (token position, token, text).

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use xxhash_rust::xxh3::xxh3_64_with_seed;

use super::{
    BatchLimits, DecodingSpec, Strategy, TranslationBackend, TranslationError, TranslationRequest,
    TranslationResponse,
};

pub const PIVOT_MARK: char = 'º';

pub fn load_dictionary(path: &Path) -> Result<BTreeMap<String, String>, TranslationError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(TranslationError::DictionaryMissing(path.to_path_buf()))
        }
        Err(e) => {
            return Err(TranslationError::DictionaryInvalid {
                path: path.to_path_buf(),
                message: e.to_string(),
            })
        }
    };
    serde_json::from_str(&text).map_err(|e| TranslationError::DictionaryInvalid {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

#[derive(Debug, Clone)]
pub struct MockBackend {
    dictionary: BTreeMap<String, String>,
    seed: u64,
    limits: BatchLimits,
}

impl MockBackend {
    pub fn new(dictionary: BTreeMap<String, String>, seed: u64) -> Self {
        MockBackend {
            dictionary,
            seed,
            limits: BatchLimits::default(),
        }
    }

    pub fn from_file(path: impl AsRef<Path>, seed: u64) -> Result<Self, TranslationError> {
        Ok(Self::new(load_dictionary(path.as_ref())?, seed))
    }

    pub fn with_limits(mut self, limits: BatchLimits) -> Self {
        self.limits = limits;
        self
    }

    pub fn dictionary(&self) -> &BTreeMap<String, String> {
        &self.dictionary
    }

    pub fn translate_one(&self, text: &str, spec: &DecodingSpec) -> String {
        if is_pivot_text(text) {
            self.backward(text, spec)
        } else {
            forward(text, spec)
        }
    }

    fn backward(&self, text: &str, spec: &DecodingSpec) -> String {
        let seed = spec.seed.unwrap_or(self.seed);
        let mut tokens: Vec<&str> = text
            .split_whitespace()
            .map(|t| t.strip_prefix(PIVOT_MARK).unwrap_or(t))
            .filter(|t| !t.is_empty())
            .collect();
        tokens.reverse();
        let substituted: Vec<String> = tokens
            .iter()
            .enumerate()
            .map(|(pos, tok)| {
                let apply = match spec.strategy {
                    Strategy::Beam { .. } => true,
                    Strategy::Nucleus { p } => substitution_draw(seed, pos, tok, text) < p,
                };
                if apply {
                    self.simplify(tok)
                } else {
                    (*tok).to_string()
                }
            })
            .collect();
        // Substitutions may introduce spaces; re-split so the limits see words.
        let words: Vec<&str> = substituted
            .iter()
            .flat_map(|s| s.split_whitespace())
            .collect();
        finish(words, spec)
    }

    /// Dictionary lookup on the token with leading/trailing punctuation peeled.
    fn simplify(&self, token: &str) -> String {
        let core_start = token
            .char_indices()
            .find(|(_, c)| c.is_alphanumeric())
            .map(|(i, _)| i);
        let Some(start) = core_start else {
            return token.to_string();
        };
        let end = token
            .char_indices()
            .rev()
            .find(|(_, c)| c.is_alphanumeric())
            .map(|(i, c)| i + c.len_utf8())
            .unwrap_or(token.len());
        let core = &token[start..end];
        match self.dictionary.get(core) {
            Some(rep) => format!("{}{}{}", &token[..start], rep, &token[end..]),
            None => token.to_string(),
        }
    }
}

fn is_pivot_text(text: &str) -> bool {
    let mut any = false;
    for tok in text.split_whitespace() {
        if !tok.starts_with(PIVOT_MARK) {
            return false;
        }
        any = true;
    }
    any
}

fn forward(text: &str, spec: &DecodingSpec) -> String {
    let lower = text.to_lowercase();
    let mut tokens: Vec<&str> = lower.split_whitespace().collect();
    tokens.reverse();
    let marked: Vec<String> = tokens.iter().map(|t| format!("{PIVOT_MARK}{t}")).collect();
    finish(marked.iter().map(String::as_str).collect(), spec)
}

/// Applies the no-repeat n-gram constraint (later duplicates are dropped) and
/// the token budget, then joins with single spaces.
fn finish(tokens: Vec<&str>, spec: &DecodingSpec) -> String {
    let n = spec.no_repeat_ngram as usize;
    let mut out: Vec<&str> = Vec::with_capacity(tokens.len());
    let mut seen: HashSet<Vec<&str>> = HashSet::new();
    for tok in tokens {
        if out.len() >= spec.max_tokens as usize {
            break;
        }
        if n > 0 && out.len() + 1 >= n {
            let mut gram: Vec<&str> = out[out.len() + 1 - n..].to_vec();
            gram.push(tok);
            if !seen.insert(gram) {
                continue;
            }
        }
        out.push(tok);
    }
    out.join(" ")
}

fn substitution_draw(seed: u64, position: usize, token: &str, text: &str) -> f64 {
    let key = format!("{position}\u{0}{token}\u{0}{text}");
    let h = xxh3_64_with_seed(key.as_bytes(), seed);
    (h >> 11) as f64 / (1u64 << 53) as f64
}

impl TranslationBackend for MockBackend {
    fn id(&self) -> &str {
        "mock"
    }

    fn limits(&self) -> BatchLimits {
        self.limits
    }

    fn translate_batch(
        &self,
        request: &TranslationRequest,
    ) -> Result<TranslationResponse, TranslationError> {
        Ok(TranslationResponse {
            translations: request
                .texts
                .iter()
                .map(|t| self.translate_one(t, &request.decoding))
                .collect(),
        })
    }
}
