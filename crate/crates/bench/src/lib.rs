//! Seeded inputs for the benches.

use mtlens::corpus::{Corpus, Sample};
use mtlens::reprdist::EmbeddingSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS: &[&str] = &[
    "what", "is", "the", "man", "holding", "in", "his", "left", "hand", "how", "many", "people",
    "are", "standing", "near", "red", "car", "which", "color", "kite", "flying", "above", "beach",
    "where", "dog", "sitting", "large", "wooden", "table", "kitchen", "small", "child", "wearing",
];

pub fn sentences(n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(5..15);
            let mut s: Vec<&str> = (0..len).map(|_| *WORDS.choose(&mut rng).unwrap()).collect();
            s.push("?");
            s.join(" ")
        })
        .collect()
}

pub fn corpus(n: usize, seed: u64) -> Corpus {
    let samples = sentences(n, seed)
        .into_iter()
        .enumerate()
        .map(|(i, t)| Sample::human(format!("b{i}"), t, "en"))
        .collect();
    Corpus::new(samples).expect("generated ids are unique")
}

pub fn embeddings(n: usize, d: usize, shift: f32, seed: u64) -> EmbeddingSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * d)
        .map(|_| rng.gen_range(-1.0f32..1.0) + shift)
        .collect();
    EmbeddingSet::new(n, d, data).expect("shape matches")
}
