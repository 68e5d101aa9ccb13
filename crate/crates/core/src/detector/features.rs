use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use xxhash_rust::xxh3::xxh3_64_with_seed;

use super::DetectorError;
use crate::metrics::tokenize;

pub const MIN_HASH_DIM: usize = 1 << 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub char_ngrams: RangeInclusive<u32>,
    pub word_ngrams: RangeInclusive<u32>,
    pub hash_dim: usize,
    pub hash_seed: u64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            char_ngrams: 3..=5,
            word_ngrams: 1..=2,
            hash_dim: 1 << 18,
            hash_seed: 0,
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<(), DetectorError> {
        let bad = |m: &str| Err(DetectorError::InvalidConfig(m.to_string()));
        if self.char_ngrams.is_empty() || *self.char_ngrams.start() == 0 {
            return bad("char n-gram range must be non-empty and start at >= 1");
        }
        if self.word_ngrams.is_empty() || *self.word_ngrams.start() == 0 {
            return bad("word n-gram range must be non-empty and start at >= 1");
        }
        if !self.hash_dim.is_power_of_two() || self.hash_dim < MIN_HASH_DIM {
            return bad("hash_dim must be a power of two >= 1024");
        }
        if self.hash_dim > u32::MAX as usize {
            return bad("hash_dim must fit in 32 bits");
        }
        Ok(())
    }
}

/// Sorted, duplicate-free sparse vector.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
}

impl SparseVector {
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices
            .iter()
            .map(|i| *i as usize)
            .zip(self.values.iter().copied())
    }

    pub fn dot(&self, dense: &[f32]) -> f64 {
        self.iter().map(|(i, v)| v * dense[i] as f64).sum()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn bucket(kind: u8, key: &str, cfg: &FeatureConfig) -> u32 {
    let mut bytes = Vec::with_capacity(key.len() + 1);
    bytes.push(kind);
    bytes.extend_from_slice(key.as_bytes());
    (xxh3_64_with_seed(&bytes, cfg.hash_seed) & (cfg.hash_dim as u64 - 1)) as u32
}

/// Hashed counts of character n-grams over the lowercased text (spaces
/// included) and word n-grams over its tokens, L2-normalized.
pub fn featurize(text: &str, cfg: &FeatureConfig) -> SparseVector {
    let mut counts: BTreeMap<u32, f64> = BTreeMap::new();
    let lower = text.to_lowercase();
    let chars: Vec<char> = lower.chars().collect();
    for n in cfg.char_ngrams.clone() {
        for gram in chars.windows(n as usize) {
            let key: String = gram.iter().collect();
            *counts.entry(bucket(b'c', &key, cfg)).or_insert(0.0) += 1.0;
        }
    }
    let tokens = tokenize(text).into_inner();
    for n in cfg.word_ngrams.clone() {
        for gram in tokens.windows(n as usize) {
            let key = gram.join("\u{1f}");
            *counts.entry(bucket(b'w', &key, cfg)).or_insert(0.0) += 1.0;
        }
    }
    let norm = counts.values().map(|v| v * v).sum::<f64>().sqrt();
    let (indices, values) = counts
        .into_iter()
        .map(|(i, v)| (i, if norm > 0.0 { v / norm } else { 0.0 }))
        .unzip();
    SparseVector { indices, values }
}
