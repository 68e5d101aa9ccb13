//! Tools for studying translation artifacts in multilingual question corpora:
//! round-trip translation, a human-likeness detector, lexical diversity and
//! MT quality metrics, Fréchet distance between embedding sets, paired
//! significance tests and MERGE/TAG data augmentation.

pub mod augment;
pub mod corpus;
pub mod detector;
pub mod metrics;
pub mod reprdist;
pub mod translation;

pub use augment::{AugmentError, AugmentManifest, AugmentMethod, TagPolicy};
pub use corpus::{
    align, load_corpus, save_corpus, Corpus, CorpusError, Origin, OriginKind, ParallelCorpus,
    Sample,
};
pub use detector::{DetectorError, DetectorModel, FeatureConfig, SplitResult, TrainParams};
pub use metrics::{DiversityReport, MetricsError, MtScore, TTestResult};
pub use reprdist::{EmbeddingSet, FidResult, FidRow, GaussianStats, ReprError};
pub use translation::{
    BackendConfig, DecodingSpec, Strategy, TranslationBackend, TranslationError,
};

/// Any error raised by the library, with a stable short name for reporting.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Translation(#[from] TranslationError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Detector(#[from] DetectorError),
    #[error(transparent)]
    Repr(#[from] ReprError),
    #[error(transparent)]
    Augment(#[from] AugmentError),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::Corpus(e) => e.name(),
            Error::Translation(e) => e.name(),
            Error::Metrics(e) => e.name(),
            Error::Detector(e) => e.name(),
            Error::Repr(e) => e.name(),
            Error::Augment(e) => e.name(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
