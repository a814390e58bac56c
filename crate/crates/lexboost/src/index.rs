//! Inverted and forward indexes with the collection statistics the scoring
//! models consume.
//!
//! Documents keep their external string ids; internally everything is keyed
//! by dense u32 ordinals assigned in corpus order. Terms are likewise mapped
//! to dense term ids in lexicographic order, which makes builds and the
//! on-disk format deterministic.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use crate::binio::{BinReader, BinWriter};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::tokenize::Tokenizer;

const INDEX_MAGIC: &[u8; 4] = b"LXBI";
const INDEX_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc: u32,
    pub tf: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermPostings {
    /// Total occurrences across the corpus (the collection frequency F).
    pub collection_freq: u64,
    /// (doc ordinal, term frequency), sorted by ordinal, no duplicates.
    pub postings: Vec<Posting>,
}

impl TermPostings {
    /// Number of documents containing the term.
    pub fn doc_freq(&self) -> usize {
        self.postings.len()
    }
}

/// Postings plus all corpus statistics. Immutable once built or loaded.
#[derive(Debug, Clone)]
pub struct InvertedIndex {
    doc_ids: Vec<String>,
    id_to_ordinal: HashMap<String, u32>,
    doc_lengths: Vec<u32>,
    total_tokens: u64,
    terms: Vec<String>,
    term_ids: HashMap<String, u32>,
    postings: Vec<TermPostings>,
    tokenizer: Tokenizer,
}

/// Per-document `(term_id, tf)` lists sorted by term id. Lets neighbor
/// documents be scored on demand without the original text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForwardIndex {
    docs: Vec<Vec<(u32, u32)>>,
}

impl InvertedIndex {
    pub fn num_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn avg_doc_length(&self) -> f64 {
        self.total_tokens as f64 / self.doc_ids.len() as f64
    }

    pub fn doc_length(&self, ordinal: u32) -> u32 {
        self.doc_lengths[ordinal as usize]
    }

    pub fn doc_id(&self, ordinal: u32) -> &str {
        &self.doc_ids[ordinal as usize]
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn ordinal(&self, doc_id: &str) -> Option<u32> {
        self.id_to_ordinal.get(doc_id).copied()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Vocabulary in term-id order (lexicographic).
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term_id(&self, term: &str) -> Option<u32> {
        self.term_ids.get(term).copied()
    }

    pub fn term(&self, term: &str) -> Option<&TermPostings> {
        self.term_id(term).map(|id| &self.postings[id as usize])
    }

    pub fn term_by_id(&self, term_id: u32) -> &TermPostings {
        &self.postings[term_id as usize]
    }

    pub fn doc_freq(&self, term: &str) -> usize {
        self.term(term).map_or(0, |t| t.doc_freq())
    }

    pub fn collection_freq(&self, term: &str) -> u64 {
        self.term(term).map_or(0, |t| t.collection_freq)
    }

    pub fn tokenizer(&self) -> &Tokenizer {
        &self.tokenizer
    }
}

impl PartialEq for InvertedIndex {
    fn eq(&self, other: &Self) -> bool {
        self.doc_ids == other.doc_ids
            && self.doc_lengths == other.doc_lengths
            && self.total_tokens == other.total_tokens
            && self.terms == other.terms
            && self.postings == other.postings
            && self.tokenizer == other.tokenizer
    }
}

impl ForwardIndex {
    /// `(term_id, tf)` pairs of one document, sorted by term id.
    pub fn terms_of(&self, ordinal: u32) -> &[(u32, u32)] {
        &self.docs[ordinal as usize]
    }

    pub fn tf(&self, ordinal: u32, term_id: u32) -> u32 {
        let list = &self.docs[ordinal as usize];
        match list.binary_search_by_key(&term_id, |&(t, _)| t) {
            Ok(i) => list[i].1,
            Err(_) => 0,
        }
    }

    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }
}

/// Build both indexes from a corpus. Deterministic given corpus order.
pub fn build_index(corpus: &Corpus, tokenizer: &Tokenizer) -> Result<(InvertedIndex, ForwardIndex)> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let mut doc_ids = Vec::with_capacity(corpus.len());
    let mut doc_lengths = Vec::with_capacity(corpus.len());
    let mut total_tokens = 0u64;
    let mut per_doc_counts: Vec<BTreeMap<String, u32>> = Vec::with_capacity(corpus.len());
    let mut postings_by_term: BTreeMap<String, Vec<Posting>> = BTreeMap::new();

    for (ord, doc) in corpus.documents().iter().enumerate() {
        let tokens = tokenizer.tokenize(&doc.text);
        doc_lengths.push(tokens.len() as u32);
        total_tokens += tokens.len() as u64;
        doc_ids.push(doc.doc_id.clone());

        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        for token in tokens {
            *counts.entry(token).or_insert(0) += 1;
        }
        for (term, tf) in &counts {
            postings_by_term
                .entry(term.clone())
                .or_default()
                .push(Posting { doc: ord as u32, tf: *tf });
        }
        per_doc_counts.push(counts);
    }

    let mut terms = Vec::with_capacity(postings_by_term.len());
    let mut postings = Vec::with_capacity(postings_by_term.len());
    let mut term_ids = HashMap::with_capacity(postings_by_term.len());
    for (term, list) in postings_by_term {
        let collection_freq = list.iter().map(|p| p.tf as u64).sum();
        term_ids.insert(term.clone(), terms.len() as u32);
        terms.push(term);
        postings.push(TermPostings {
            collection_freq,
            postings: list,
        });
    }

    let forward = ForwardIndex {
        docs: per_doc_counts
            .iter()
            .map(|counts| {
                // BTreeMap iterates terms in lexicographic order, which is
                // exactly term-id order.
                counts.iter().map(|(t, &tf)| (term_ids[t], tf)).collect()
            })
            .collect(),
    };

    let id_to_ordinal = doc_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), i as u32))
        .collect();

    Ok((
        InvertedIndex {
            doc_ids,
            id_to_ordinal,
            doc_lengths,
            total_tokens,
            terms,
            term_ids,
            postings,
            tokenizer: tokenizer.clone(),
        },
        forward,
    ))
}

/// Persist both indexes to one file.
///
/// Layout (all little-endian): magic `LXBI`, version u32, then sections:
/// stopwords, document table (id + length per ordinal), lexicon with
/// postings (term, F, df, df×(ordinal, tf)), forward index
/// (per doc: count×(term_id, tf)).
pub fn save_index(inverted: &InvertedIndex, forward: &ForwardIndex, path: &Path) -> Result<()> {
    let mut w = BinWriter::new(BufWriter::new(File::create(path)?));
    w.magic(INDEX_MAGIC)?;
    w.u32(INDEX_VERSION)?;

    w.u32(inverted.tokenizer.stopwords.len() as u32)?;
    for word in &inverted.tokenizer.stopwords {
        w.string(word)?;
    }

    w.u32(inverted.doc_ids.len() as u32)?;
    w.u64(inverted.total_tokens)?;
    for (id, len) in inverted.doc_ids.iter().zip(&inverted.doc_lengths) {
        w.string(id)?;
        w.u32(*len)?;
    }

    w.u32(inverted.terms.len() as u32)?;
    for (term, tp) in inverted.terms.iter().zip(&inverted.postings) {
        w.string(term)?;
        w.u64(tp.collection_freq)?;
        w.u32(tp.postings.len() as u32)?;
        for p in &tp.postings {
            w.u32(p.doc)?;
            w.u32(p.tf)?;
        }
    }

    for doc in &forward.docs {
        w.u32(doc.len() as u32)?;
        for (term_id, tf) in doc {
            w.u32(*term_id)?;
            w.u32(*tf)?;
        }
    }
    w.finish()
}

pub fn load_index(path: &Path) -> Result<(InvertedIndex, ForwardIndex)> {
    let mut r = BinReader::new(BufReader::new(File::open(path)?), "index");
    r.expect_magic(INDEX_MAGIC)?;
    r.expect_version(INDEX_VERSION)?;

    let n_stop = r.len()?;
    let mut stopwords = Vec::with_capacity(n_stop);
    for _ in 0..n_stop {
        stopwords.push(r.string()?);
    }

    let num_docs = r.len()?;
    if num_docs == 0 {
        return Err(Error::corrupt("index", "zero documents"));
    }
    let total_tokens = r.u64()?;
    let mut doc_ids = Vec::with_capacity(num_docs);
    let mut doc_lengths = Vec::with_capacity(num_docs);
    for _ in 0..num_docs {
        doc_ids.push(r.string()?);
        doc_lengths.push(r.u32()?);
    }
    if doc_lengths.iter().map(|&l| l as u64).sum::<u64>() != total_tokens {
        return Err(Error::corrupt("index", "document lengths disagree with total"));
    }

    let num_terms = r.len()?;
    let mut terms = Vec::with_capacity(num_terms);
    let mut postings = Vec::with_capacity(num_terms);
    for _ in 0..num_terms {
        let term = r.string()?;
        if let Some(prev) = terms.last() {
            if prev >= &term {
                return Err(Error::corrupt("index", "lexicon out of order"));
            }
        }
        let collection_freq = r.u64()?;
        let df = r.len()?;
        let mut list = Vec::with_capacity(df);
        let mut sum = 0u64;
        for _ in 0..df {
            let doc = r.u32()?;
            let tf = r.u32()?;
            if doc as usize >= num_docs {
                return Err(Error::corrupt("index", "posting ordinal out of range"));
            }
            if let Some(prev) = list.last() {
                let prev: &Posting = prev;
                if prev.doc >= doc {
                    return Err(Error::corrupt("index", "postings out of order"));
                }
            }
            sum += tf as u64;
            list.push(Posting { doc, tf });
        }
        if sum != collection_freq {
            return Err(Error::corrupt("index", "collection frequency disagrees with postings"));
        }
        terms.push(term);
        postings.push(TermPostings {
            collection_freq,
            postings: list,
        });
    }

    let mut docs = Vec::with_capacity(num_docs);
    for _ in 0..num_docs {
        let n = r.len()?;
        let mut list = Vec::with_capacity(n);
        for _ in 0..n {
            let term_id = r.u32()?;
            let tf = r.u32()?;
            if term_id as usize >= num_terms {
                return Err(Error::corrupt("index", "forward term id out of range"));
            }
            list.push((term_id, tf));
        }
        docs.push(list);
    }
    r.expect_eof()?;

    let id_to_ordinal: HashMap<String, u32> = doc_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), i as u32))
        .collect();
    if id_to_ordinal.len() != doc_ids.len() {
        return Err(Error::corrupt("index", "duplicate doc ids"));
    }
    let term_ids = terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i as u32))
        .collect();

    Ok((
        InvertedIndex {
            doc_ids,
            id_to_ordinal,
            doc_lengths,
            total_tokens,
            terms,
            term_ids,
            postings,
            tokenizer: Tokenizer::with_stopwords(stopwords),
        },
        ForwardIndex { docs },
    ))
}
