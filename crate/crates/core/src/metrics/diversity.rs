//! Sentence-level lexical diversity: type/token ratio and lexical density,
//! macro-averaged over a corpus.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::tokenize::{is_punctuation, tokenize, TokenList};
use super::MetricsError;
use crate::corpus::Corpus;

const ENGLISH_STOPLIST: &str = include_str!("../../data/stoplist_en.txt");

/// Function words (determiners, prepositions, pronouns, conjunctions,
/// auxiliaries, particles). Everything else that is not punctuation counts
/// as a content word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stoplist {
    words: HashSet<String>,
}

impl Stoplist {
    pub fn english() -> Self {
        Self::parse(ENGLISH_STOPLIST)
    }

    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Stoplist { words }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MetricsError> {
        let path = path.as_ref();
        std::fs::read_to_string(path)
            .map(|t| Self::parse(&t))
            .map_err(|e| MetricsError::Io(format!("{}: {e}", path.display())))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for Stoplist {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Stoplist {
            words: iter.into_iter().map(|s| s.into().to_lowercase()).collect(),
        }
    }
}

/// Unique tokens over total tokens. Punctuation tokens count.
pub fn ttr(tokens: &TokenList) -> Result<f64, MetricsError> {
    if tokens.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let unique: HashSet<&str> = tokens.iter().map(String::as_str).collect();
    Ok(unique.len() as f64 / tokens.len() as f64)
}

/// Content tokens (not a function word, not pure punctuation) over all tokens.
pub fn lexical_density(tokens: &TokenList, function_words: &Stoplist) -> Result<f64, MetricsError> {
    if tokens.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let content = tokens
        .iter()
        .filter(|t| !function_words.contains(t) && !is_punctuation(t))
        .count();
    Ok(content as f64 / tokens.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    Macro,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityReport {
    pub ttr: f64,
    pub ld: f64,
    pub n_sentences: usize,
    /// Sentences that tokenized to nothing and were left out of the means.
    pub skipped: usize,
    pub aggregation: Aggregation,
}

/// Macro average of per-sentence TTR and LD.
pub fn corpus_diversity(
    corpus: &Corpus,
    function_words: &Stoplist,
) -> Result<DiversityReport, MetricsError> {
    diversity_of_texts(corpus.iter().map(|s| s.text.as_str()), function_words)
}

pub fn diversity_of_texts<'a>(
    texts: impl IntoIterator<Item = &'a str>,
    function_words: &Stoplist,
) -> Result<DiversityReport, MetricsError> {
    let (mut ttr_sum, mut ld_sum) = (0.0, 0.0);
    let (mut n, mut skipped) = (0usize, 0usize);
    let mut seen_any = false;
    for text in texts {
        seen_any = true;
        let tokens = tokenize(text);
        if tokens.is_empty() {
            skipped += 1;
            continue;
        }
        ttr_sum += ttr(&tokens)?;
        ld_sum += lexical_density(&tokens, function_words)?;
        n += 1;
    }
    if !seen_any || n == 0 {
        return Err(MetricsError::EmptyCorpus);
    }
    Ok(DiversityReport {
        ttr: ttr_sum / n as f64,
        ld: ld_sum / n as f64,
        n_sentences: n,
        skipped,
        aggregation: Aggregation::Macro,
    })
}
