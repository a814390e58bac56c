//! Ranked result lists.

use crate::error::{Error, Result};
use std::collections::HashSet;

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredDoc {
    pub doc_id: String,
    pub score: f64,
}

/// A ranked list of scored documents for one query. Rank i+1 is position i;
/// scores are non-increasing and doc ids unique.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub query_id: String,
    /// Run name written to the last column of TREC output.
    pub tag: String,
    pub docs: Vec<ScoredDoc>,
}

impl Run {
    pub fn new(query_id: impl Into<String>, tag: impl Into<String>, docs: Vec<ScoredDoc>) -> Self {
        Self {
            query_id: query_id.into(),
            tag: tag.into(),
            docs,
        }
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// Check ranked-list invariants: unique doc ids, non-increasing scores.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::with_capacity(self.docs.len());
        for pair in self.docs.windows(2) {
            if pair[1].score > pair[0].score {
                return Err(Error::InvalidParam(format!(
                    "run {}: scores increase at doc {}",
                    self.query_id, pair[1].doc_id
                )));
            }
        }
        for doc in &self.docs {
            if !seen.insert(doc.doc_id.as_str()) {
                return Err(Error::InvalidParam(format!(
                    "run {}: duplicate doc id {}",
                    self.query_id, doc.doc_id
                )));
            }
        }
        Ok(())
    }

    /// Sort by score descending, ties by doc id ascending.
    pub fn sort_standard(&mut self) {
        self.docs.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| a.doc_id.cmp(&b.doc_id))
        });
    }
}
