use serde::Serialize;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Lowercased word tokens. No token is empty or contains whitespace.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct TokenList(Vec<String>);

impl TokenList {
    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, String> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }
}

impl<S: AsRef<str>> FromIterator<S> for TokenList {
    /// Collects already-split tokens, lowercasing them and dropping any that
    /// are empty. Tokens containing whitespace are split.
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenList(
            iter.into_iter()
                .flat_map(|s| {
                    s.as_ref()
                        .split_whitespace()
                        .map(str::to_lowercase)
                        .collect::<Vec<_>>()
                })
                .collect(),
        )
    }
}

impl<'a> IntoIterator for &'a TokenList {
    type Item = &'a String;
    type IntoIter = std::slice::Iter<'a, String>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

pub fn is_punctuation_char(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace() && !is_combining_mark(c)
}

/// True for a non-empty token made only of punctuation characters.
pub fn is_punctuation(token: &str) -> bool {
    !token.is_empty() && token.chars().all(is_punctuation_char)
}

/// NFC-normalize, lowercase, split on whitespace, then peel leading and
/// trailing punctuation off each word as one-character tokens. Inner
/// punctuation ("don't", "3.5") stays attached. No script-specific
/// segmentation is attempted.
pub fn tokenize(text: &str) -> TokenList {
    let normalized: String = text.nfc().collect::<String>().to_lowercase();
    let mut out = Vec::new();
    for word in normalized.split_whitespace() {
        let chars: Vec<(usize, char)> = word.char_indices().collect();
        let lead = chars
            .iter()
            .take_while(|(_, c)| is_punctuation_char(*c))
            .count();
        if lead == chars.len() {
            out.extend(chars.iter().map(|(_, c)| c.to_string()));
            continue;
        }
        let trail = chars
            .iter()
            .rev()
            .take_while(|(_, c)| is_punctuation_char(*c))
            .count();
        out.extend(chars[..lead].iter().map(|(_, c)| c.to_string()));
        let start = chars[lead].0;
        let end = chars
            .get(chars.len() - trail)
            .map_or(word.len(), |(i, _)| *i);
        out.push(word[start..end].to_string());
        out.extend(
            chars[chars.len() - trail..]
                .iter()
                .map(|(_, c)| c.to_string()),
        );
    }
    TokenList(out)
}
