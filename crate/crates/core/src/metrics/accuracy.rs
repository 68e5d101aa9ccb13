use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::corpus::Corpus;

/// Label for the overall group and for the single group used when no group
/// map is given.
pub const ALL_GROUP: &str = "all";
/// Group for gold ids that are missing from a supplied group map.
pub const UNGROUPED: &str = "ungrouped";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupAccuracy {
    pub accuracy: f64,
    pub correct: usize,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AccuracyOptions {
    /// Score gold ids without a prediction as wrong instead of failing.
    pub allow_missing: bool,
}

fn normalize(answer: &str) -> String {
    answer.trim().to_lowercase()
}

/// Normalized exact-match accuracy per group, plus the overall `"all"` group.
pub fn group_accuracy(
    predictions: &HashMap<String, String>,
    gold: &Corpus,
    groups: Option<&HashMap<String, String>>,
    opts: AccuracyOptions,
) -> Result<BTreeMap<String, GroupAccuracy>, MetricsError> {
    let mut tally: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for sample in gold {
        let answer = sample
            .answer
            .as_deref()
            .ok_or_else(|| MetricsError::MissingAnswer(sample.id.clone()))?;
        let correct = match predictions.get(&sample.id) {
            Some(pred) => normalize(pred) == normalize(answer),
            None if opts.allow_missing => false,
            None => return Err(MetricsError::MissingPrediction(sample.id.clone())),
        };
        let mut bump = |label: &str| {
            let e = tally.entry(label.to_string()).or_insert((0, 0));
            e.0 += usize::from(correct);
            e.1 += 1;
        };
        bump(ALL_GROUP);
        if let Some(groups) = groups.filter(|g| !g.is_empty()) {
            let label = groups.get(&sample.id).map_or(UNGROUPED, String::as_str);
            if label != ALL_GROUP {
                bump(label);
            }
        }
    }
    if tally.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    Ok(tally
        .into_iter()
        .map(|(g, (correct, n))| {
            (
                g,
                GroupAccuracy {
                    accuracy: correct as f64 / n as f64,
                    correct,
                    n,
                },
            )
        })
        .collect())
}
