//! Document vectors for graph construction and embedding re-ranking.
//!
//! Vectors either come from an external file (precomputed by any encoder) or
//! from the built-in deterministic tf-idf embedder. Two file formats are
//! supported: JSON lines `{"id": …, "vector": […]}` and a raw binary layout
//! (magic `LXBE`, version, counts, id table, row-major 32-bit floats).

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::Deserialize;

use crate::binio::{BinReader, BinWriter};
use crate::error::{Error, Result};
use crate::index::{ForwardIndex, InvertedIndex};

const EMB_MAGIC: &[u8; 4] = b"LXBE";
const EMB_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingSource {
    Ingested,
    TfidfBuiltin,
}

/// N document vectors of fixed dimension, aligned to corpus ordinals.
/// No row is the all-zero vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    dim: usize,
    doc_ids: Vec<String>,
    id_to_ordinal: HashMap<String, u32>,
    data: Vec<f32>,
    pub source: EmbeddingSource,
}

impl EmbeddingMatrix {
    fn from_rows(doc_ids: Vec<String>, dim: usize, data: Vec<f32>, source: EmbeddingSource) -> Self {
        let id_to_ordinal = doc_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i as u32))
            .collect();
        Self {
            dim,
            doc_ids,
            id_to_ordinal,
            data,
            source,
        }
    }

    pub fn num_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, ordinal: u32) -> &[f32] {
        let start = ordinal as usize * self.dim;
        &self.data[start..start + self.dim]
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn ordinal(&self, doc_id: &str) -> Option<u32> {
        self.id_to_ordinal.get(doc_id).copied()
    }
}

/// Cosine similarity with f64 accumulation. Zero-norm inputs yield 0.
pub fn cosine(a: &[f32], b: &[f32]) -> f64 {
    let dot = dot(a, b);
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (na * nb)
}

pub fn dot(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| x as f64 * y as f64)
        .sum()
}

pub fn norm(a: &[f32]) -> f64 {
    a.iter().map(|&x| (x as f64) * (x as f64)).sum::<f64>().sqrt()
}

/// Weight terms by `tf * ln(N / df)` and L2-normalize. A document whose every
/// term occurs in all N documents (all idf zero) gets a uniform unit vector
/// over its terms instead of the zero vector.
fn tfidf_weights(
    inv: &InvertedIndex,
    terms: &[(u32, u32)],
    doc_label: &str,
) -> Result<Vec<(u32, f64)>> {
    if terms.is_empty() {
        return Err(Error::ZeroVector(doc_label.to_string()));
    }
    let n = inv.num_docs() as f64;
    let mut weights: Vec<(u32, f64)> = terms
        .iter()
        .map(|&(term_id, tf)| {
            let df = inv.term_by_id(term_id).doc_freq() as f64;
            (term_id, tf as f64 * (n / df).ln())
        })
        .collect();
    let sq: f64 = weights.iter().map(|(_, w)| w * w).sum();
    if sq == 0.0 {
        let u = 1.0 / (weights.len() as f64).sqrt();
        for (_, w) in &mut weights {
            *w = u;
        }
    } else {
        let inv_norm = 1.0 / sq.sqrt();
        for (_, w) in &mut weights {
            *w *= inv_norm;
        }
    }
    Ok(weights)
}

/// Deterministic built-in document embedder over the corpus vocabulary.
/// Dimension equals the vocabulary size; component order is term-id order.
pub fn embed_tfidf(inv: &InvertedIndex, fwd: &ForwardIndex) -> Result<EmbeddingMatrix> {
    let dim = inv.num_terms();
    let n = inv.num_docs();
    let mut data = vec![0.0f32; n * dim];
    for ord in 0..n as u32 {
        let weights = tfidf_weights(inv, fwd.terms_of(ord), inv.doc_id(ord))?;
        let row = &mut data[ord as usize * dim..(ord as usize + 1) * dim];
        for (term_id, w) in weights {
            row[term_id as usize] = w as f32;
        }
    }
    Ok(EmbeddingMatrix::from_rows(
        inv.doc_ids().to_vec(),
        dim,
        data,
        EmbeddingSource::TfidfBuiltin,
    ))
}

/// Embed free text (a query) with the same tf-idf weighting as the documents.
/// Terms outside the corpus vocabulary are dropped; a query with no known
/// terms embeds to the zero vector (cosine treats it as similarity 0).
pub fn embed_query_tfidf(inv: &InvertedIndex, terms: &[String]) -> Vec<f32> {
    let mut counts: HashMap<u32, u32> = HashMap::new();
    for t in terms {
        if let Some(id) = inv.term_id(t) {
            *counts.entry(id).or_insert(0) += 1;
        }
    }
    let mut vec = vec![0.0f32; inv.num_terms()];
    if counts.is_empty() {
        return vec;
    }
    let mut pairs: Vec<(u32, u32)> = counts.into_iter().collect();
    pairs.sort_unstable();
    // cannot fail: pairs is non-empty
    let weights = tfidf_weights(inv, &pairs, "query").unwrap();
    for (term_id, w) in weights {
        vec[term_id as usize] = w as f32;
    }
    vec
}

#[derive(Deserialize)]
struct JsonEmbedding {
    id: String,
    vector: Vec<f32>,
}

fn looks_binary(path: &Path) -> Result<bool> {
    let mut f = File::open(path)?;
    let mut magic = [0u8; 4];
    match f.read_exact(&mut magic) {
        Ok(()) => Ok(&magic == EMB_MAGIC),
        Err(_) => Ok(false),
    }
}

/// Load document vectors for exactly the given doc ids, in ordinal order.
/// The format (binary vs JSON lines) is detected from the file's magic bytes.
pub fn ingest_embeddings(path: &Path, expected_ids: &[String]) -> Result<EmbeddingMatrix> {
    let rows = if looks_binary(path)? {
        read_binary_rows(path)?
    } else {
        read_jsonl_rows(path)?
    };
    align_rows(rows, expected_ids)
}

fn read_jsonl_rows(path: &Path) -> Result<Vec<(String, Vec<f32>)>> {
    let display = path.display().to_string();
    let reader = BufReader::new(File::open(path)?);
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: JsonEmbedding = serde_json::from_str(&line)
            .map_err(|e| Error::parse(&display, idx + 1, e.to_string()))?;
        rows.push((parsed.id, parsed.vector));
    }
    Ok(rows)
}

fn read_binary_rows(path: &Path) -> Result<Vec<(String, Vec<f32>)>> {
    let mut r = BinReader::new(BufReader::new(File::open(path)?), "embeddings");
    r.expect_magic(EMB_MAGIC)?;
    r.expect_version(EMB_VERSION)?;
    let n = r.len()?;
    let dim = r.len()?;
    let mut ids = Vec::with_capacity(n);
    for _ in 0..n {
        ids.push(r.string()?);
    }
    let mut rows = Vec::with_capacity(n);
    for id in ids {
        let mut v = Vec::with_capacity(dim);
        for _ in 0..dim {
            v.push(r.f32()?);
        }
        rows.push((id, v));
    }
    r.expect_eof()?;
    Ok(rows)
}

fn align_rows(rows: Vec<(String, Vec<f32>)>, expected_ids: &[String]) -> Result<EmbeddingMatrix> {
    let mut dim: Option<usize> = None;
    let mut by_id: HashMap<String, Vec<f32>> = HashMap::with_capacity(rows.len());
    for (id, vector) in rows {
        match dim {
            None => dim = Some(vector.len()),
            Some(d) if d != vector.len() => {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: vector.len(),
                })
            }
            _ => {}
        }
        if vector.iter().all(|&x| x == 0.0) {
            return Err(Error::ZeroVector(id));
        }
        if by_id.insert(id.clone(), vector).is_some() {
            return Err(Error::DuplicateEmbedding(id));
        }
    }
    let dim = dim.unwrap_or(0);
    if dim == 0 && !expected_ids.is_empty() {
        return Err(Error::MissingEmbedding(expected_ids[0].clone()));
    }

    let mut data = Vec::with_capacity(expected_ids.len() * dim);
    for id in expected_ids {
        let row = by_id
            .remove(id)
            .ok_or_else(|| Error::MissingEmbedding(id.clone()))?;
        data.extend_from_slice(&row);
    }
    if let Some(extra) = by_id.into_keys().next() {
        return Err(Error::UnknownDocId(extra));
    }
    Ok(EmbeddingMatrix::from_rows(
        expected_ids.to_vec(),
        dim,
        data,
        EmbeddingSource::Ingested,
    ))
}

/// Write the binary embedding format.
pub fn save_embeddings(emb: &EmbeddingMatrix, path: &Path) -> Result<()> {
    let mut w = BinWriter::new(std::io::BufWriter::new(File::create(path)?));
    w.magic(EMB_MAGIC)?;
    w.u32(EMB_VERSION)?;
    w.u32(emb.num_docs() as u32)?;
    w.u32(emb.dim() as u32)?;
    for id in emb.doc_ids() {
        w.string(id)?;
    }
    for ord in 0..emb.num_docs() as u32 {
        for &x in emb.row(ord) {
            w.f32(x)?;
        }
    }
    w.finish()
}

/// Per-query vectors for embedding re-ranking, JSON lines keyed by query id.
pub fn load_query_vectors(path: &Path) -> Result<HashMap<String, Vec<f32>>> {
    let rows = read_jsonl_rows(path)?;
    let mut map = HashMap::with_capacity(rows.len());
    for (id, vector) in rows {
        if map.insert(id.clone(), vector).is_some() {
            return Err(Error::DuplicateEmbedding(id));
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Corpus, Document};
    use crate::index::build_index;
    use crate::tokenize::Tokenizer;
    use std::io::Write;

    fn toy() -> (InvertedIndex, ForwardIndex) {
        let corpus = Corpus::from_documents([
            Document::new("d1", "a b a"),
            Document::new("d2", "b c"),
            Document::new("d3", "c c c"),
        ])
        .unwrap();
        build_index(&corpus, &Tokenizer::new()).unwrap()
    }

    #[test]
    fn tfidf_toy_cosines() {
        let (inv, fwd) = toy();
        let emb = embed_tfidf(&inv, &fwd).unwrap();
        assert_eq!(emb.dim(), 3);
        // hand-computed from tf * ln(N/df), L2-normalized
        let c12 = cosine(emb.row(0), emb.row(1));
        assert!((c12 - 0.12831948188497175).abs() < 1e-6, "got {c12}");
        assert!(cosine(emb.row(0), emb.row(2)).abs() < 1e-9);
        let c23 = cosine(emb.row(1), emb.row(2));
        assert!((c23 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    }

    #[test]
    fn unique_term_doc_is_one_hot() {
        let corpus = Corpus::from_documents([
            Document::new("d1", "zebra"),
            Document::new("d2", "apple apple"),
        ])
        .unwrap();
        let (inv, fwd) = build_index(&corpus, &Tokenizer::new()).unwrap();
        let emb = embed_tfidf(&inv, &fwd).unwrap();
        let row = emb.row(0);
        let nonzero: Vec<_> = row.iter().filter(|&&x| x != 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert!((nonzero[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn identical_docs_have_cosine_one() {
        let corpus = Corpus::from_documents([
            Document::new("d1", "x y z"),
            Document::new("d2", "x y z"),
            Document::new("d3", "w"),
        ])
        .unwrap();
        let (inv, fwd) = build_index(&corpus, &Tokenizer::new()).unwrap();
        let emb = embed_tfidf(&inv, &fwd).unwrap();
        assert_eq!(emb.row(0), emb.row(1));
        assert!((cosine(emb.row(0), emb.row(1)) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn all_idf_zero_gets_uniform_fallback() {
        let corpus = Corpus::from_documents([
            Document::new("d1", "x y"),
            Document::new("d2", "x y x"),
        ])
        .unwrap();
        let (inv, fwd) = build_index(&corpus, &Tokenizer::new()).unwrap();
        let emb = embed_tfidf(&inv, &fwd).unwrap();
        let expect = 1.0 / 2.0f32.sqrt();
        assert!((emb.row(0)[0] - expect).abs() < 1e-6);
        assert!((emb.row(0)[1] - expect).abs() < 1e-6);
    }

    #[test]
    fn empty_document_rejected() {
        let corpus = Corpus::from_documents([
            Document::new("d1", "x"),
            Document::new("d2", ""),
        ])
        .unwrap();
        let (inv, fwd) = build_index(&corpus, &Tokenizer::new()).unwrap();
        let err = embed_tfidf(&inv, &fwd).unwrap_err();
        assert!(matches!(err, Error::ZeroVector(id) if id == "d2"));
    }

    #[test]
    fn query_embedding_matches_identical_doc() {
        let (inv, fwd) = toy();
        let emb = embed_tfidf(&inv, &fwd).unwrap();
        let qv = embed_query_tfidf(&inv, &["b".into(), "c".into()]);
        assert!((cosine(&qv, emb.row(1)) - 1.0).abs() < 1e-6);
        // unknown-only query embeds to zero; cosine guard yields 0
        let zero = embed_query_tfidf(&inv, &["qqq".into()]);
        assert_eq!(cosine(&zero, emb.row(0)), 0.0);
    }

    fn ids(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn ingest_jsonl() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, r#"{{"id": "d2", "vector": [0.0, 1.0, 0.0, 1.0]}}"#).unwrap();
        writeln!(f, r#"{{"id": "d1", "vector": [1.0, 0.0, 0.0, 0.0]}}"#).unwrap();
        let emb = ingest_embeddings(f.path(), &ids(&["d1", "d2"])).unwrap();
        assert_eq!(emb.num_docs(), 2);
        assert_eq!(emb.dim(), 4);
        assert_eq!(emb.row(0), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(emb.ordinal("d2"), Some(1));
        assert_eq!(emb.source, EmbeddingSource::Ingested);
    }

    #[test]
    fn ingest_missing_id() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, r#"{{"id": "d1", "vector": [1.0]}}"#).unwrap();
        let err = ingest_embeddings(f.path(), &ids(&["d1", "d2"])).unwrap_err();
        assert!(matches!(err, Error::MissingEmbedding(id) if id == "d2"));
    }

    #[test]
    fn ingest_dimension_mismatch() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, r#"{{"id": "d1", "vector": [1.0, 2.0]}}"#).unwrap();
        writeln!(f, r#"{{"id": "d2", "vector": [1.0]}}"#).unwrap();
        let err = ingest_embeddings(f.path(), &ids(&["d1", "d2"])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, found: 1 }));
    }

    #[test]
    fn ingest_zero_vector() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, r#"{{"id": "d1", "vector": [0.0, 0.0]}}"#).unwrap();
        let err = ingest_embeddings(f.path(), &ids(&["d1"])).unwrap_err();
        assert!(matches!(err, Error::ZeroVector(id) if id == "d1"));
    }

    #[test]
    fn ingest_duplicate_and_unknown_ids() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, r#"{{"id": "d1", "vector": [1.0]}}"#).unwrap();
        writeln!(f, r#"{{"id": "d1", "vector": [2.0]}}"#).unwrap();
        let err = ingest_embeddings(f.path(), &ids(&["d1"])).unwrap_err();
        assert!(matches!(err, Error::DuplicateEmbedding(_)));

        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, r#"{{"id": "d1", "vector": [1.0]}}"#).unwrap();
        writeln!(f, r#"{{"id": "dX", "vector": [2.0]}}"#).unwrap();
        let err = ingest_embeddings(f.path(), &ids(&["d1"])).unwrap_err();
        assert!(matches!(err, Error::UnknownDocId(id) if id == "dX"));
    }

    #[test]
    fn binary_roundtrip() {
        let (inv, fwd) = toy();
        let emb = embed_tfidf(&inv, &fwd).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_embeddings(&emb, f.path()).unwrap();
        let back = ingest_embeddings(f.path(), &ids(&["d1", "d2", "d3"])).unwrap();
        assert_eq!(emb.dim(), back.dim());
        for ord in 0..3u32 {
            assert_eq!(emb.row(ord), back.row(ord));
        }
    }
}
