//! Corpus-level BLEU (13a tokenization, exponential smoothing) and chrF
//! (character 6-grams, beta = 2), single reference, case-sensitive.

use std::collections::HashMap;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::MetricsError;

pub const BLEU_SIGNATURE: &str = "nrefs:1|case:mixed|eff:no|tok:13a|smooth:exp";
pub const CHRF_SIGNATURE: &str = "nrefs:1|case:mixed|eff:yes|nc:6|nw:0|space:no";

const BLEU_MAX_ORDER: usize = 4;
const CHRF_CHAR_ORDER: usize = 6;
const CHRF_BETA: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MtMetric {
    Bleu,
    ChrF,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MtScore {
    pub metric: MtMetric,
    /// In `[0, 100]`.
    pub value: f64,
    pub signature: String,
}

fn check_inputs<H: AsRef<str>, R: AsRef<str>>(hyps: &[H], refs: &[R]) -> Result<(), MetricsError> {
    if hyps.len() != refs.len() {
        return Err(MetricsError::LengthMismatch {
            left: hyps.len(),
            right: refs.len(),
        });
    }
    if hyps.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    Ok(())
}

fn tok13a_rules() -> &'static [(Regex, &'static str); 4] {
    static RULES: OnceLock<[(Regex, &'static str); 4]> = OnceLock::new();
    RULES.get_or_init(|| {
        [
            // Symbols: { | } ~ [ \ ] ^ _ ` space ! " # $ % & ( ) * + : ; < = > ? @ /
            (
                Regex::new(r"([\{-~\[-`\x20-&\(-\+:-@/])").unwrap(),
                " ${1} ",
            ),
            // Period and comma unless preceded by a digit.
            (Regex::new(r"([^0-9])([\.,])").unwrap(), "${1} ${2} "),
            // Period and comma unless followed by a digit.
            (Regex::new(r"([\.,])([^0-9])").unwrap(), " ${1} ${2}"),
            // Dash preceded by a digit.
            (Regex::new(r"([0-9])(-)").unwrap(), "${1} ${2} "),
        ]
    })
}

/// mteval-v13a tokenization, returning the whitespace-separated tokens.
pub fn tokenize_13a(line: &str) -> Vec<String> {
    let mut line = line
        .trim_end()
        .replace("<skipped>", "")
        .replace("-\n", "")
        .replace('\n', " ");
    if line.contains('&') {
        line = line
            .replace("&quot;", "\"")
            .replace("&amp;", "&")
            .replace("&lt;", "<")
            .replace("&gt;", ">");
    }
    let mut line = format!(" {line} ");
    for (re, rep) in tok13a_rules() {
        line = re.replace_all(&line, *rep).into_owned();
    }
    line.split_whitespace().map(str::to_string).collect()
}

fn word_ngrams(tokens: &[String], max_order: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    for n in 1..=max_order {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Clipped n-gram matches and totals per order, plus lengths, summed over
/// the corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub correct: [u64; BLEU_MAX_ORDER],
    pub total: [u64; BLEU_MAX_ORDER],
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl BleuStats {
    fn add_segment(&mut self, hyp: &str, reference: &str) {
        let h = tokenize_13a(hyp);
        let r = tokenize_13a(reference);
        self.hyp_len += h.len() as u64;
        self.ref_len += r.len() as u64;
        let ref_counts = word_ngrams(&r, BLEU_MAX_ORDER);
        for (gram, count) in word_ngrams(&h, BLEU_MAX_ORDER) {
            let order = gram.len() - 1;
            self.total[order] += count as u64;
            if let Some(rc) = ref_counts.get(gram) {
                self.correct[order] += count.min(*rc) as u64;
            }
        }
    }

    /// BLEU in `[0, 100]` with NIST-style exponential smoothing: the k-th
    /// order with zero matches gets precision `1 / (2^k * total)`.
    pub fn score(&self) -> f64 {
        if self.correct.iter().all(|&c| c == 0) {
            return 0.0;
        }
        let bp = if self.hyp_len < self.ref_len {
            if self.hyp_len == 0 {
                0.0
            } else {
                (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp()
            }
        } else {
            1.0
        };
        let mut smooth = 1.0;
        let mut log_sum = 0.0;
        for n in 0..BLEU_MAX_ORDER {
            if self.total[n] == 0 {
                // No n-grams of this order anywhere: the geometric mean collapses.
                return 0.0;
            }
            let p = if self.correct[n] == 0 {
                smooth *= 2.0;
                1.0 / (smooth * self.total[n] as f64)
            } else {
                self.correct[n] as f64 / self.total[n] as f64
            };
            log_sum += p.ln();
        }
        100.0 * bp * (log_sum / BLEU_MAX_ORDER as f64).exp()
    }
}

pub fn bleu_stats<H: AsRef<str>, R: AsRef<str>>(
    hyps: &[H],
    refs: &[R],
) -> Result<BleuStats, MetricsError> {
    check_inputs(hyps, refs)?;
    let mut stats = BleuStats::default();
    for (h, r) in hyps.iter().zip(refs) {
        stats.add_segment(h.as_ref(), r.as_ref());
    }
    Ok(stats)
}

pub fn bleu<H: AsRef<str>, R: AsRef<str>>(hyps: &[H], refs: &[R]) -> Result<MtScore, MetricsError> {
    let stats = bleu_stats(hyps, refs)?;
    Ok(MtScore {
        metric: MtMetric::Bleu,
        value: stats.score().clamp(0.0, 100.0),
        signature: BLEU_SIGNATURE.to_string(),
    })
}

fn char_ngrams(chars: &[char], n: usize) -> HashMap<&[char], usize> {
    let mut counts = HashMap::new();
    for gram in chars.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// Per order: (hypothesis n-grams, reference n-grams, matches).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChrfStats {
    pub orders: [[u64; 3]; CHRF_CHAR_ORDER],
}

impl ChrfStats {
    fn add_segment(&mut self, hyp: &str, reference: &str) {
        let h: Vec<char> = hyp.chars().filter(|c| !c.is_whitespace()).collect();
        let r: Vec<char> = reference.chars().filter(|c| !c.is_whitespace()).collect();
        for n in 1..=CHRF_CHAR_ORDER {
            let hc = char_ngrams(&h, n);
            let rc = char_ngrams(&r, n);
            let ref_total: usize = rc.values().sum();
            let mut hyp_total = 0;
            let mut matches = 0;
            for (gram, count) in &hc {
                hyp_total += count;
                if let Some(c) = rc.get(gram) {
                    matches += (*count).min(*c);
                }
            }
            let slot = &mut self.orders[n - 1];
            // Hypothesis n-grams only count when the reference has any.
            slot[0] += if rc.is_empty() { 0 } else { hyp_total as u64 };
            slot[1] += ref_total as u64;
            slot[2] += matches as u64;
        }
    }

    /// F-beta over precision and recall averaged across the orders where both
    /// sides have n-grams.
    pub fn score(&self) -> f64 {
        let factor = CHRF_BETA * CHRF_BETA;
        let (mut avg_p, mut avg_r, mut effective) = (0.0, 0.0, 0usize);
        for &[n_hyp, n_ref, n_match] in &self.orders {
            if n_hyp > 0 && n_ref > 0 {
                avg_p += n_match as f64 / n_hyp as f64;
                avg_r += n_match as f64 / n_ref as f64;
                effective += 1;
            }
        }
        if effective == 0 {
            return 0.0;
        }
        avg_p /= effective as f64;
        avg_r /= effective as f64;
        if avg_p + avg_r == 0.0 {
            return 0.0;
        }
        100.0 * (1.0 + factor) * avg_p * avg_r / (factor * avg_p + avg_r)
    }
}

pub fn chrf_stats<H: AsRef<str>, R: AsRef<str>>(
    hyps: &[H],
    refs: &[R],
) -> Result<ChrfStats, MetricsError> {
    check_inputs(hyps, refs)?;
    let mut stats = ChrfStats::default();
    for (h, r) in hyps.iter().zip(refs) {
        stats.add_segment(h.as_ref(), r.as_ref());
    }
    Ok(stats)
}

pub fn chrf<H: AsRef<str>, R: AsRef<str>>(hyps: &[H], refs: &[R]) -> Result<MtScore, MetricsError> {
    let stats = chrf_stats(hyps, refs)?;
    Ok(MtScore {
        metric: MtMetric::ChrF,
        value: stats.score().clamp(0.0, 100.0),
        signature: CHRF_SIGNATURE.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tokenizer_13a_cases() {
        assert_eq!(
            tokenize_13a("Hello, world. It costs $3.50-4 (approx)!"),
            [
                "Hello", ",", "world", ".", "It", "costs", "$", "3.50", "-", "4", "(", "approx",
                ")", "!"
            ]
        );
        assert_eq!(tokenize_13a("a &amp; b"), ["a", "&", "b"]);
        assert_eq!(tokenize_13a("1,000.5"), ["1,000.5"]);
        assert_eq!(tokenize_13a("don't"), ["don't"]);
    }

    #[test]
    fn identity_is_100() {
        let x = [
            "Are these animals all the same species?",
            "What color is the large bus?",
        ];
        assert_eq!(bleu(&x, &x).unwrap().value, 100.0);
        assert_eq!(chrf(&x, &x).unwrap().value, 100.0);
    }

    #[test]
    fn disjoint_chars_give_zero_chrf() {
        assert_eq!(chrf(&["aaaa"], &["zzzz"]).unwrap().value, 0.0);
    }

    #[test]
    fn no_overlap_bleu_is_zero() {
        assert_eq!(bleu(&["a b c d e"], &["v w x y z"]).unwrap().value, 0.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            bleu(&["a"], &["a", "b"]),
            Err(MetricsError::LengthMismatch { left: 1, right: 2 })
        ));
        let empty: [&str; 0] = [];
        assert!(matches!(
            chrf(&empty, &empty),
            Err(MetricsError::EmptyInput)
        ));
    }

    #[test]
    fn exp_smoothing_on_missing_fourgrams() {
        // 5 unigrams match, 4 bigrams match, 2 of 3 trigrams, 0 of 2 4-grams.
        let s = bleu_stats(&["a b c d x"], &["a b c d y"]).unwrap();
        assert_eq!(s.correct, [4, 3, 2, 1]);
        let s = bleu_stats(&["a b x c d"], &["a b y c d"]).unwrap();
        assert_eq!(s.correct, [4, 2, 0, 0]);
        assert_eq!(s.total, [5, 4, 3, 2]);
        let log_mean =
            ((0.8f64).ln() + (0.5f64).ln() + (1.0f64 / 6.0).ln() + (1.0f64 / 8.0).ln()) / 4.0;
        assert!((s.score() - 100.0 * log_mean.exp()).abs() < 1e-12);
    }

    #[test]
    fn signatures() {
        let x = ["abc"];
        assert_eq!(bleu(&x, &x).unwrap().signature, BLEU_SIGNATURE);
        assert!(BLEU_SIGNATURE.contains("tok:13a|smooth:exp"));
        assert_eq!(chrf(&x, &x).unwrap().metric, MtMetric::ChrF);
    }

    proptest! {
        #[test]
        fn scores_in_range(
            pairs in prop::collection::vec(("[a-d ]{0,20}", "[a-d ]{0,20}"), 1..6)
        ) {
            let (h, r): (Vec<String>, Vec<String>) = pairs.into_iter().unzip();
            let b = bleu(&h, &r).unwrap().value;
            let c = chrf(&h, &r).unwrap().value;
            prop_assert!((0.0..=100.0).contains(&b));
            prop_assert!((0.0..=100.0).contains(&c));
        }

        #[test]
        fn self_score_is_100(words in prop::collection::vec("[a-z]{1,6}", 4..15)) {
            let x = [words.join(" ")];
            prop_assert_eq!(bleu(&x, &x).unwrap().value, 100.0);
            prop_assert_eq!(chrf(&x, &x).unwrap().value, 100.0);
        }
    }
}
