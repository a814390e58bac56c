//! Document collections and corpus file ingestion.
//!
//! Two line-oriented input formats:
//! * TSV: `<doc_id>\t<text>` per line
//! * JSON lines: `{"id": ..., "contents": ...}` per line

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub text: String,
}

impl Document {
    pub fn new(doc_id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            doc_id: doc_id.into(),
            text: text.into(),
        }
    }
}

/// An ordered document collection. Ordinals are dense 0..N-1 in insertion
/// order; the id map is a bijection onto them.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    documents: Vec<Document>,
    id_to_ordinal: HashMap<String, u32>,
}

impl Corpus {
    pub fn from_documents<I>(docs: I) -> Result<Self>
    where
        I: IntoIterator<Item = Document>,
    {
        let mut corpus = Corpus::default();
        for doc in docs {
            corpus.push(doc)?;
        }
        Ok(corpus)
    }

    fn push(&mut self, doc: Document) -> Result<()> {
        if doc.doc_id.is_empty() {
            return Err(Error::EmptyDocId);
        }
        let ordinal = self.documents.len() as u32;
        if self.id_to_ordinal.insert(doc.doc_id.clone(), ordinal).is_some() {
            return Err(Error::DuplicateDocId(doc.doc_id));
        }
        self.documents.push(doc);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn ordinal(&self, doc_id: &str) -> Option<u32> {
        self.id_to_ordinal.get(doc_id).copied()
    }
}

/// Corpus file format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Tsv,
    JsonLines,
}

impl CorpusFormat {
    /// Pick a format from the file extension: `.jsonl`/`.json` read as JSON
    /// lines, anything else as TSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") => CorpusFormat::JsonLines,
            _ => CorpusFormat::Tsv,
        }
    }
}

#[derive(Deserialize)]
struct JsonDoc {
    id: String,
    contents: String,
}

/// Read a corpus file. Lines are `<doc_id>\t<text>` (TSV) or
/// `{"id":…,"contents":…}` (JSON lines). Blank lines are skipped.
pub fn read_corpus(path: &Path, format: CorpusFormat) -> Result<Corpus> {
    let display = path.display().to_string();
    let reader = BufReader::new(File::open(path)?);
    let mut docs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let doc = match format {
            CorpusFormat::Tsv => {
                let (id, text) = line
                    .split_once('\t')
                    .ok_or_else(|| Error::parse(&display, lineno, "expected <doc_id>\\t<text>"))?;
                Document::new(id, text)
            }
            CorpusFormat::JsonLines => {
                let parsed: JsonDoc = serde_json::from_str(&line)
                    .map_err(|e| Error::parse(&display, lineno, e.to_string()))?;
                Document::new(parsed.id, parsed.contents)
            }
        };
        docs.push(doc);
    }
    Corpus::from_documents(docs)
}
