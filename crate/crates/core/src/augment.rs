//! MERGE and TAG augmentation of a human corpus with its round-trip
//! translated counterpart.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, OriginKind, Sample};

pub const DEFAULT_TAG_TOKEN: &str = "[MT]";
pub const MACHINE_ID_SUFFIX: &str = "#mt";
pub const MANIFEST_SUFFIX: &str = ".manifest.json";

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error("corpora are in different languages: `{0}` vs `{1}`")]
    MixedLanguage(String, String),
    #[error("suffixed machine id `{0}` collides with an existing id")]
    IdCollisionAfterSuffix(String),
    #[error("sample `{0}` is already tagged")]
    AlreadyTagged(String),
    #[error("sample `{0}` is tagged but its text lacks the tag prefix")]
    MalformedTag(String),
    #[error("invalid tag token: {0}")]
    InvalidPolicy(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl AugmentError {
    pub fn name(&self) -> &'static str {
        match self {
            AugmentError::MixedLanguage(..) => "MixedLanguage",
            AugmentError::IdCollisionAfterSuffix(_) => "IdCollisionAfterSuffix",
            AugmentError::AlreadyTagged(_) => "AlreadyTagged",
            AugmentError::MalformedTag(_) => "MalformedTag",
            AugmentError::InvalidPolicy(_) => "InvalidPolicy",
            AugmentError::Io(_) => "IoError",
        }
    }
}

/// Prefix token for machine-origin texts, separated from the text by one space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagPolicy {
    pub token: String,
}

impl Default for TagPolicy {
    fn default() -> Self {
        TagPolicy {
            token: DEFAULT_TAG_TOKEN.to_string(),
        }
    }
}

impl TagPolicy {
    pub fn new(token: impl Into<String>) -> Result<Self, AugmentError> {
        let policy = TagPolicy {
            token: token.into(),
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<(), AugmentError> {
        if self.token.is_empty() || self.token.chars().any(char::is_whitespace) {
            return Err(AugmentError::InvalidPolicy(format!("{:?}", self.token)));
        }
        Ok(())
    }

    fn prefix(&self) -> String {
        format!("{} ", self.token)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AugmentMethod {
    Merge,
    Tag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestInput {
    pub path: Option<String>,
    pub count: usize,
    /// Sample counts per origin kind.
    pub origins: BTreeMap<String, usize>,
}

impl ManifestInput {
    fn of(corpus: &Corpus) -> Self {
        let mut origins = BTreeMap::new();
        for s in corpus {
            let key = match s.origin.kind {
                OriginKind::Human => "human",
                OriginKind::Machine => "machine",
            };
            *origins.entry(key.to_string()).or_insert(0) += 1;
        }
        ManifestInput {
            path: None,
            count: corpus.len(),
            origins,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentManifest {
    pub method: AugmentMethod,
    pub inputs: Vec<ManifestInput>,
    pub output_count: usize,
    /// Suggested multiplier on the training-step budget; 0.5 when the data doubled.
    pub steps_scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag_token: Option<String>,
    pub created_at: String,
}

impl AugmentManifest {
    /// Records the file each input was read from, in input order.
    pub fn with_paths<P: AsRef<Path>>(mut self, paths: &[P]) -> Self {
        for (input, p) in self.inputs.iter_mut().zip(paths) {
            input.path = Some(p.as_ref().display().to_string());
        }
        self
    }

    pub fn reconciles(&self) -> bool {
        self.inputs.iter().map(|i| i.count).sum::<usize>() == self.output_count
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), AugmentError> {
        let mut json = serde_json::to_string_pretty(self).map_err(std::io::Error::from)?;
        json.push('\n');
        std::fs::write(path, json)?;
        Ok(())
    }
}

/// `out.jsonl` -> `out.manifest.json`; other names get the suffix appended.
pub fn manifest_path(output: impl AsRef<Path>) -> PathBuf {
    let output = output.as_ref();
    let name = output
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let stem = name.strip_suffix(".jsonl").unwrap_or(&name);
    output.with_file_name(format!("{stem}{MANIFEST_SUFFIX}"))
}

fn now() -> String {
    humantime::format_rfc3339_seconds(SystemTime::now()).to_string()
}

fn shared_language(human: &Corpus, machine: &Corpus) -> Result<(), AugmentError> {
    let lang = |c: &Corpus| {
        c.language()
            .map(|l| l.map(str::to_string))
            .map_err(|(a, b)| AugmentError::MixedLanguage(a, b))
    };
    if let (Some(h), Some(m)) = (lang(human)?, lang(machine)?) {
        if h != m {
            return Err(AugmentError::MixedLanguage(h, m));
        }
    }
    Ok(())
}

fn combine(
    human: &Corpus,
    machine: Vec<Sample>,
    method: AugmentMethod,
    tag_token: Option<String>,
    machine_input: ManifestInput,
) -> Result<(Corpus, AugmentManifest), AugmentError> {
    let mut seen: HashSet<&str> = human.ids().collect();
    let mut collision = None;
    let suffixed: Vec<Sample> = machine
        .into_iter()
        .map(|mut s| {
            s.id.push_str(MACHINE_ID_SUFFIX);
            s
        })
        .collect();
    for s in &suffixed {
        if !seen.insert(s.id.as_str()) {
            collision = Some(s.id.clone());
            break;
        }
    }
    if let Some(id) = collision {
        return Err(AugmentError::IdCollisionAfterSuffix(id));
    }

    let steps_scale = if human.is_empty() || suffixed.is_empty() {
        1.0
    } else {
        0.5
    };
    let mut samples = human.samples.clone();
    samples.extend(suffixed);
    let output = Corpus {
        samples,
        meta: human.meta.clone(),
    };
    let manifest = AugmentManifest {
        method,
        inputs: vec![ManifestInput::of(human), machine_input],
        output_count: output.len(),
        steps_scale,
        tag_token,
        created_at: now(),
    };
    Ok((output, manifest))
}

/// Human samples unchanged, then machine samples with ids suffixed `#mt`.
pub fn merge(human: &Corpus, machine: &Corpus) -> Result<(Corpus, AugmentManifest), AugmentError> {
    shared_language(human, machine)?;
    combine(
        human,
        machine.samples.clone(),
        AugmentMethod::Merge,
        None,
        ManifestInput::of(machine),
    )
}

fn is_tagged(s: &Sample, policy: &TagPolicy) -> bool {
    s.text.starts_with(&policy.token) || s.tags.contains(&policy.token)
}

/// Prefixes every machine-origin text with the tag token.
pub fn tag(corpus: &Corpus, policy: &TagPolicy) -> Result<Corpus, AugmentError> {
    policy.validate()?;
    let prefix = policy.prefix();
    let samples = corpus
        .iter()
        .map(|s| {
            if s.origin.is_human() {
                return Ok(s.clone());
            }
            if is_tagged(s, policy) {
                return Err(AugmentError::AlreadyTagged(s.id.clone()));
            }
            let mut out = s.clone();
            out.text = format!("{prefix}{}", s.text);
            out.tags.push(policy.token.clone());
            Ok(out)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Corpus {
        samples,
        meta: corpus.meta.clone(),
    })
}

/// Inverse of [`tag`]: strips the prefix from every sample carrying the token in its tags.
pub fn untag(corpus: &Corpus, policy: &TagPolicy) -> Result<Corpus, AugmentError> {
    policy.validate()?;
    let prefix = policy.prefix();
    let samples = corpus
        .iter()
        .map(|s| {
            let Some(pos) = s.tags.iter().rposition(|t| *t == policy.token) else {
                return Ok(s.clone());
            };
            let Some(text) = s.text.strip_prefix(&prefix) else {
                return Err(AugmentError::MalformedTag(s.id.clone()));
            };
            let mut out = s.clone();
            out.text = text.to_string();
            out.tags.remove(pos);
            Ok(out)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Corpus {
        samples,
        meta: corpus.meta.clone(),
    })
}

/// [`merge`] with the machine half tagged.
pub fn merge_tag(
    human: &Corpus,
    machine: &Corpus,
    policy: &TagPolicy,
) -> Result<(Corpus, AugmentManifest), AugmentError> {
    shared_language(human, machine)?;
    let tagged = tag(machine, policy)?;
    combine(
        human,
        tagged.samples,
        AugmentMethod::Tag,
        Some(policy.token.clone()),
        ManifestInput::of(machine),
    )
}
