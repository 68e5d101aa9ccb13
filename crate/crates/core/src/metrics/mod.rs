//! Lexical diversity, MT quality, grouped accuracy and significance testing.

mod accuracy;
mod diversity;
mod mt;
mod stats;
mod tokenize;

use thiserror::Error;

pub use accuracy::{group_accuracy, AccuracyOptions, GroupAccuracy, ALL_GROUP, UNGROUPED};
pub use diversity::{
    corpus_diversity, diversity_of_texts, lexical_density, ttr, Aggregation, DiversityReport,
    Stoplist,
};
pub use mt::{
    bleu, bleu_stats, chrf, chrf_stats, tokenize_13a, BleuStats, ChrfStats, MtMetric, MtScore,
    BLEU_SIGNATURE, CHRF_SIGNATURE,
};
pub use stats::{paired_t_test, student_t_two_sided, TTestResult};
pub use tokenize::{is_punctuation, tokenize, TokenList};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("empty input")]
    EmptyInput,
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least 2 pairs, got {0}")]
    TooFewPairs(usize),
    #[error("all paired differences are equal; t is undefined")]
    DegenerateZeroVariance,
    #[error("non-finite value in input")]
    NonFinite,
    #[error("no prediction for id `{0}`")]
    MissingPrediction(String),
    #[error("gold sample `{0}` has no answer")]
    MissingAnswer(String),
    #[error("{0}")]
    Io(String),
}

impl MetricsError {
    pub fn name(&self) -> &'static str {
        match self {
            MetricsError::EmptyInput => "EmptyInput",
            MetricsError::EmptyCorpus => "EmptyCorpus",
            MetricsError::LengthMismatch { .. } => "LengthMismatch",
            MetricsError::TooFewPairs(_) => "TooFewPairs",
            MetricsError::DegenerateZeroVariance => "DegenerateZeroVariance",
            MetricsError::NonFinite => "NonFinite",
            MetricsError::MissingPrediction(_) => "MissingPrediction",
            MetricsError::MissingAnswer(_) => "MissingAnswer",
            MetricsError::Io(_) => "IoError",
        }
    }
}
