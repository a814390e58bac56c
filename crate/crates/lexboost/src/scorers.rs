//! The four lexical relevance models: BM25, PL2, DPH and QLD.
//!
//! All arithmetic is f64. Retrieval accumulates term-at-a-time over postings
//! and is score-exact with respect to brute-force per-document scoring: both
//! paths add the same term contributions in the same order.

use crate::error::{Error, Result};
use crate::index::{ForwardIndex, InvertedIndex};
use crate::run::{Run, ScoredDoc};
use crate::tokenize::Tokenizer;

/// Scoring model with validated parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScoringModel {
    /// Okapi BM25 with the non-negative `ln(1 + …)` idf.
    Bm25 { k1: f64, b: f64 },
    /// Poisson-Laplace DFR model with second normalization.
    Pl2 { c: f64 },
    /// Hypergeometric DFR model, parameter-free.
    Dph,
    /// Query likelihood with Dirichlet smoothing.
    Qld { mu: f64 },
}

pub const DEFAULT_K1: f64 = 1.2;
pub const DEFAULT_B: f64 = 0.75;
pub const DEFAULT_PL2_C: f64 = 1.0;
pub const DEFAULT_QLD_MU: f64 = 1000.0;

impl ScoringModel {
    pub fn bm25(k1: f64, b: f64) -> Result<Self> {
        if !(k1 > 0.0) {
            return Err(Error::InvalidParam(format!("bm25 k1 must be > 0, got {k1}")));
        }
        if !(0.0..=1.0).contains(&b) {
            return Err(Error::InvalidParam(format!("bm25 b must be in [0,1], got {b}")));
        }
        Ok(ScoringModel::Bm25 { k1, b })
    }

    pub fn pl2(c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::InvalidParam(format!("pl2 c must be > 0, got {c}")));
        }
        Ok(ScoringModel::Pl2 { c })
    }

    pub fn dph() -> Self {
        ScoringModel::Dph
    }

    pub fn qld(mu: f64) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::InvalidParam(format!("qld mu must be > 0, got {mu}")));
        }
        Ok(ScoringModel::Qld { mu })
    }

    pub fn default_bm25() -> Self {
        ScoringModel::Bm25 {
            k1: DEFAULT_K1,
            b: DEFAULT_B,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScoringModel::Bm25 { .. } => "bm25",
            ScoringModel::Pl2 { .. } => "pl2",
            ScoringModel::Dph => "dph",
            ScoringModel::Qld { .. } => "qld",
        }
    }
}

/// A query tokenized with the same tokenizer as the documents.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub query_id: String,
    pub text: String,
    pub terms: Vec<String>,
}

impl Query {
    pub fn new(query_id: impl Into<String>, text: impl Into<String>, tokenizer: &Tokenizer) -> Self {
        let text = text.into();
        let terms = tokenizer.tokenize(&text);
        Self {
            query_id: query_id.into(),
            text,
            terms,
        }
    }
}

/// One distinct query term that exists in the collection, with its query
/// multiplicity and collection statistics.
struct QueryTerm {
    term_id: u32,
    qtf: f64,
    doc_freq: f64,
    collection_freq: f64,
}

struct Prepared<'a> {
    model: &'a ScoringModel,
    num_docs: f64,
    avg_doc_length: f64,
    total_tokens: f64,
    terms: Vec<QueryTerm>,
    /// For QLD: query term occurrences with nonzero collection probability.
    scored_occurrences: f64,
}

impl<'a> Prepared<'a> {
    fn new(query: &Query, model: &'a ScoringModel, index: &InvertedIndex) -> Self {
        // Distinct terms in first-occurrence order, with multiplicities.
        let mut distinct: Vec<(&str, u32)> = Vec::new();
        for term in &query.terms {
            match distinct.iter_mut().find(|(t, _)| *t == term.as_str()) {
                Some((_, qtf)) => *qtf += 1,
                None => distinct.push((term, 1)),
            }
        }

        let mut terms = Vec::with_capacity(distinct.len());
        let mut scored_occurrences = 0.0;
        for (term, qtf) in distinct {
            if let Some(tp) = index.term(term) {
                terms.push(QueryTerm {
                    term_id: index.term_id(term).unwrap(),
                    qtf: qtf as f64,
                    doc_freq: tp.doc_freq() as f64,
                    collection_freq: tp.collection_freq as f64,
                });
                scored_occurrences += qtf as f64;
            }
        }
        Self {
            model,
            num_docs: index.num_docs() as f64,
            avg_doc_length: index.avg_doc_length(),
            total_tokens: index.total_tokens() as f64,
            terms,
            scored_occurrences,
        }
    }

    /// Score contribution of one matched (tf > 0) query term.
    fn term_contribution(&self, term: &QueryTerm, tf: f64, dl: f64) -> f64 {
        match *self.model {
            ScoringModel::Bm25 { k1, b } => {
                let idf = ((self.num_docs - term.doc_freq + 0.5) / (term.doc_freq + 0.5) + 1.0).ln();
                term.qtf * idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / self.avg_doc_length))
            }
            ScoringModel::Pl2 { c } => {
                let tfn = tf * (1.0 + c * self.avg_doc_length / dl).log2();
                if tfn <= 0.0 {
                    return 0.0;
                }
                let lambda = term.collection_freq / self.num_docs;
                term.qtf
                    * (1.0 / (tfn + 1.0))
                    * (tfn * (tfn / lambda).log2()
                        + (lambda - tfn) * std::f64::consts::LOG2_E
                        + 0.5 * (2.0 * std::f64::consts::PI * tfn).log2())
            }
            ScoringModel::Dph => {
                let f = tf / dl;
                if f >= 1.0 {
                    return 0.0;
                }
                let norm = (1.0 - f) * (1.0 - f) / (tf + 1.0);
                term.qtf
                    * norm
                    * (tf * (tf * (self.avg_doc_length / dl) * (self.num_docs / term.collection_freq))
                        .log2()
                        + 0.5 * (2.0 * std::f64::consts::PI * tf * (1.0 - f)).log2())
            }
            ScoringModel::Qld { mu } => {
                let p_coll = term.collection_freq / self.total_tokens;
                term.qtf * (1.0 + tf / (mu * p_coll)).ln()
            }
        }
    }

    /// Document-level additive term (QLD length normalizer), applied once per
    /// scored document.
    fn doc_normalizer(&self, dl: f64) -> f64 {
        match *self.model {
            ScoringModel::Qld { mu } => self.scored_occurrences * (mu / (dl + mu)).ln(),
            _ => 0.0,
        }
    }
}

/// Exact relevance score of one document for a query.
///
/// For BM25/PL2/DPH a document sharing no collection-present query term
/// scores 0. For QLD the Dirichlet length normalizer applies to every
/// document, so such a document scores `|q_scored| * ln(mu/(dl+mu))`.
pub fn score_document(
    query: &Query,
    doc_ordinal: u32,
    model: &ScoringModel,
    index: &InvertedIndex,
    forward: &ForwardIndex,
) -> f64 {
    let prepared = Prepared::new(query, model, index);
    let dl = index.doc_length(doc_ordinal) as f64;
    let mut score = 0.0;
    for term in &prepared.terms {
        let tf = forward.tf(doc_ordinal, term.term_id);
        if tf > 0 {
            score += prepared.term_contribution(term, tf as f64, dl);
        }
    }
    if !prepared.terms.is_empty() {
        score += prepared.doc_normalizer(dl);
    }
    score
}

/// Rank documents for a query: every document containing at least one
/// collection-present query term is scored exactly, sorted by score
/// descending with ties broken by doc id ascending, and truncated to
/// `cutoff`. An empty query (or one with no collection-present terms)
/// yields an empty run.
pub fn retrieve(
    query: &Query,
    model: &ScoringModel,
    index: &InvertedIndex,
    cutoff: usize,
) -> Result<Run> {
    if cutoff == 0 {
        return Err(Error::InvalidParam("cutoff must be >= 1".into()));
    }
    let prepared = Prepared::new(query, model, index);

    let mut scores = vec![0.0f64; index.num_docs()];
    let mut seen = vec![false; index.num_docs()];
    let mut candidates: Vec<u32> = Vec::new();

    for term in &prepared.terms {
        for posting in &index.term_by_id(term.term_id).postings {
            let dl = index.doc_length(posting.doc) as f64;
            if !seen[posting.doc as usize] {
                seen[posting.doc as usize] = true;
                candidates.push(posting.doc);
            }
            // same add sequence as score_document, keeping the two paths
            // bit-identical
            scores[posting.doc as usize] += prepared.term_contribution(term, posting.tf as f64, dl);
        }
    }

    for &ord in &candidates {
        scores[ord as usize] += prepared.doc_normalizer(index.doc_length(ord) as f64);
    }

    candidates.sort_by(|&a, &b| {
        scores[b as usize]
            .total_cmp(&scores[a as usize])
            .then_with(|| index.doc_id(a).cmp(index.doc_id(b)))
    });
    candidates.truncate(cutoff);

    Ok(Run::new(
        query.query_id.clone(),
        model.name(),
        candidates
            .into_iter()
            .map(|ord| ScoredDoc {
                doc_id: index.doc_id(ord).to_string(),
                score: scores[ord as usize],
            })
            .collect(),
    ))
}
