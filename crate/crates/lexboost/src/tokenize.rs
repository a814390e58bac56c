//! Text normalization shared by documents and queries.
//!
//! Lowercase, split on any non-alphanumeric character, drop empty tokens.
//! No stemming. An optional stopword list can be attached; it is stored in
//! the index file so queries are always tokenized the same way as the
//! documents they are matched against.

use std::collections::BTreeSet;

/// Lowercase + split on non-alphanumeric. Deterministic, no stopword removal.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

/// Tokenizer configuration. `stopwords` is empty by default (off).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tokenizer {
    pub stopwords: BTreeSet<String>,
}

impl Tokenizer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_stopwords<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            stopwords: words.into_iter().map(|w| w.into().to_lowercase()).collect(),
        }
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        let mut tokens = tokenize(text);
        if !self.stopwords.is_empty() {
            tokens.retain(|t| !self.stopwords.contains(t));
        }
        tokens
    }
}
