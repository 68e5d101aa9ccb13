//! Human-vs-machine origin classifier.
//!
//! A logistic regression over hashed character and word n-grams. Its output
//! `p_h(x) = sigmoid(w . phi(x) + b)` is the human-likeness score used to
//! split evaluation sets into a human-like and an NMT-like half of equal size.

mod features;
mod model_file;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Sample};

pub use features::{featurize, FeatureConfig, SparseVector, MIN_HASH_DIM};
pub use model_file::{load_model, read_model, save_model, write_model, MODEL_MAGIC};

#[derive(Debug, Error)]
pub enum DetectorError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("training data has only the {0} class")]
    DegenerateSingleClass(&'static str),
    #[error("invalid feature config: {0}")]
    InvalidConfig(String),
    #[error("invalid training parameters: {0}")]
    InvalidParams(String),
    #[error("not a detector model file (bad magic)")]
    BadMagic,
    #[error("model file is truncated")]
    TruncatedFile,
    #[error("model file is corrupt: {0}")]
    Corrupt(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl DetectorError {
    pub fn name(&self) -> &'static str {
        match self {
            DetectorError::EmptyCorpus => "EmptyCorpus",
            DetectorError::DegenerateSingleClass(_) => "DegenerateSingleClass",
            DetectorError::InvalidConfig(_) => "InvalidConfig",
            DetectorError::InvalidParams(_) => "InvalidParams",
            DetectorError::BadMagic => "BadMagic",
            DetectorError::TruncatedFile => "TruncatedFile",
            DetectorError::Corrupt(_) => "Corrupt",
            DetectorError::Io(_) => "IoError",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorModel {
    pub weights: Vec<f32>,
    pub bias: f32,
    pub feature_config: FeatureConfig,
    pub train_seed: u64,
    pub validation_accuracy: f64,
}

impl DetectorModel {
    /// All-zero weights; scores every text `sigmoid(bias)`.
    pub fn constant(feature_config: FeatureConfig, bias: f32) -> Self {
        DetectorModel {
            weights: vec![0.0; feature_config.hash_dim],
            bias,
            feature_config,
            train_seed: 0,
            validation_accuracy: 0.0,
        }
    }

    pub fn logit(&self, text: &str) -> f64 {
        featurize(text, &self.feature_config).dot(&self.weights) + self.bias as f64
    }

    /// Human-likeness `p_h(x)`, in the open interval (0, 1).
    pub fn score(&self, text: &str) -> f64 {
        sigmoid(self.logit(text))
    }

    pub fn is_human(&self, text: &str) -> bool {
        self.score(text) > 0.5
    }
}

pub fn score(model: &DetectorModel, text: &str) -> f64 {
    model.score(text)
}

/// Logistic function, kept strictly inside (0, 1).
pub fn sigmoid(z: f64) -> f64 {
    let s = if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    };
    s.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub seed: u64,
    /// Fraction of each (balanced) class held out for validation.
    pub holdout: f64,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            epochs: 5,
            learning_rate: 0.1,
            l2: 1e-6,
            seed: 0,
            holdout: 0.1,
        }
    }
}

impl TrainParams {
    fn validate(&self) -> Result<(), DetectorError> {
        if self.epochs == 0 {
            return Err(DetectorError::InvalidParams("epochs must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(DetectorError::InvalidParams(
                "learning rate must be positive".into(),
            ));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(DetectorError::InvalidParams(
                "l2 must be non-negative".into(),
            ));
        }
        if !(0.0..0.5).contains(&self.holdout) {
            return Err(DetectorError::InvalidParams(
                "holdout must be in [0, 0.5)".into(),
            ));
        }
        Ok(())
    }
}

struct Example {
    features: SparseVector,
    label: f64,
}

fn seeded_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    idx
}

/// Trains on a class-balanced sample (the larger class is downsampled).
/// Labels: human = 1, machine = 0. The same `params.seed`, data and config
/// always produce bit-identical weights.
pub fn train(
    human: &Corpus,
    machine: &Corpus,
    cfg: &FeatureConfig,
    params: &TrainParams,
) -> Result<DetectorModel, DetectorError> {
    cfg.validate()?;
    params.validate()?;
    match (human.is_empty(), machine.is_empty()) {
        (true, true) => return Err(DetectorError::EmptyCorpus),
        (false, true) => return Err(DetectorError::DegenerateSingleClass("human")),
        (true, false) => return Err(DetectorError::DegenerateSingleClass("machine")),
        _ => {}
    }

    let per_class = human.len().min(machine.len());
    let held = if per_class >= 2 {
        ((per_class as f64 * params.holdout).round() as usize)
            .clamp(usize::from(params.holdout > 0.0), per_class - 1)
    } else {
        0
    };
    // The same seed gives both classes the same permutation when sizes match,
    // so identical corpora produce identical held-out texts.
    let pick = |c: &Corpus| -> Vec<usize> {
        let mut p = seeded_permutation(c.len(), params.seed);
        p.truncate(per_class);
        p
    };
    let human_idx = pick(human);
    let machine_idx = pick(machine);

    let example = |s: &Sample, label: f64| Example {
        features: featurize(&s.text, cfg),
        label,
    };
    let mut train_set = Vec::with_capacity(2 * (per_class - held));
    let mut valid_set = Vec::with_capacity(2 * held);
    for (k, (&h, &m)) in human_idx.iter().zip(&machine_idx).enumerate() {
        let target = if k < held {
            &mut valid_set
        } else {
            &mut train_set
        };
        target.push(example(&human.samples[h], 1.0));
        target.push(example(&machine.samples[m], 0.0));
    }

    let mut weights = vec![0.0f64; cfg.hash_dim];
    let mut bias = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(1);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let ex = &train_set[i];
            let z: f64 = ex.features.iter().map(|(j, v)| weights[j] * v).sum::<f64>() + bias;
            let grad = sigmoid(z) - ex.label;
            for (j, v) in ex.features.iter() {
                // L2 decay is applied lazily to the active coordinates only.
                weights[j] -= params.learning_rate * (grad * v + params.l2 * weights[j]);
            }
            bias -= params.learning_rate * grad;
        }
    }

    let mut model = DetectorModel {
        weights: weights.iter().map(|w| *w as f32).collect(),
        bias: bias as f32,
        feature_config: cfg.clone(),
        train_seed: params.seed,
        validation_accuracy: 0.0,
    };
    let eval_set = if valid_set.is_empty() {
        &train_set
    } else {
        &valid_set
    };
    let correct = eval_set
        .iter()
        .filter(|ex| {
            let p = sigmoid(ex.features.dot(&model.weights) + model.bias as f64);
            (p > 0.5) == (ex.label == 1.0)
        })
        .count();
    model.validation_accuracy = correct as f64 / eval_set.len() as f64;
    Ok(model)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    pub human_like: Corpus,
    pub nmt_like: Corpus,
    /// Score of the lowest-ranked human-like sample.
    pub threshold_score: f64,
}

/// Ranks by (score descending, id ascending); the top half, plus the middle
/// sample when the count is odd, is human-like. Each half keeps input order.
pub fn split(model: &DetectorModel, corpus: &Corpus) -> Result<SplitResult, DetectorError> {
    let scores: Vec<f64> = corpus.iter().map(|s| model.score(&s.text)).collect();
    split_by_scores(corpus, &scores)
}

pub fn split_by_scores(corpus: &Corpus, scores: &[f64]) -> Result<SplitResult, DetectorError> {
    if corpus.is_empty() {
        return Err(DetectorError::EmptyCorpus);
    }
    assert_eq!(corpus.len(), scores.len(), "one score per sample");
    let mut ranked: Vec<usize> = (0..corpus.len()).collect();
    ranked.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then_with(|| corpus.samples[a].id.cmp(&corpus.samples[b].id))
    });
    let n_human = corpus.len().div_ceil(2);
    let mut is_human = vec![false; corpus.len()];
    for &i in &ranked[..n_human] {
        is_human[i] = true;
    }
    let threshold_score = scores[ranked[n_human - 1]];
    let (mut human_like, mut nmt_like) = (Vec::new(), Vec::new());
    for (s, h) in corpus.samples.iter().zip(is_human) {
        if h {
            human_like.push(s.clone());
        } else {
            nmt_like.push(s.clone());
        }
    }
    let wrap = |samples| Corpus {
        samples,
        meta: corpus.meta.clone(),
    };
    Ok(SplitResult {
        human_like: wrap(human_like),
        nmt_like: wrap(nmt_like),
        threshold_score,
    })
}

/// Class-balanced accuracy: the mean of per-class accuracies, with a text
/// predicted human iff `p_h > 0.5` (a score of exactly 0.5 counts as machine).
pub fn evaluate(
    model: &DetectorModel,
    human: &Corpus,
    machine: &Corpus,
) -> Result<f64, DetectorError> {
    if human.is_empty() || machine.is_empty() {
        return Err(DetectorError::EmptyCorpus);
    }
    let rate = |c: &Corpus, want_human: bool| {
        c.iter()
            .filter(|s| model.is_human(&s.text) == want_human)
            .count() as f64
            / c.len() as f64
    };
    Ok((rate(human, true) + rate(machine, false)) / 2.0)
}
