use std::collections::{BTreeMap, HashMap};

use super::tokenize;
use crate::corpus::{SnapshotView, TopicId};
use crate::error::Result;

/// Raw term counts of one document.
pub type TermCounts = BTreeMap<String, usize>;

/// Sparse term-weight vector, iterated in term order.
pub type SparseVector = BTreeMap<String, f64>;

/// Unigram counts over all visible questions of `t`.
pub fn topic_term_counts(v: &SnapshotView<'_>, t: &TopicId) -> Result<TermCounts> {
    let mut counts = TermCounts::new();
    for q in v.questions_of(t)? {
        for tok in tokenize(&q.text).into_inner() {
            *counts.entry(tok).or_insert(0) += 1;
        }
    }
    Ok(counts)
}

/// Document frequencies over a collection of per-topic documents.
#[derive(Clone, Debug, Default)]
pub struct DocumentFrequencies {
    n_docs: usize,
    df: HashMap<String, usize>,
}

impl DocumentFrequencies {
    /// Empty documents are not part of the collection.
    pub fn from_documents<'a>(docs: impl IntoIterator<Item = &'a TermCounts>) -> Self {
        let mut out = DocumentFrequencies::default();
        for doc in docs {
            if doc.is_empty() {
                continue;
            }
            out.n_docs += 1;
            for term in doc.keys() {
                *out.df.entry(term.clone()).or_insert(0) += 1;
            }
        }
        out
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn df(&self, term: &str) -> usize {
        self.df.get(term).copied().unwrap_or(0)
    }

    /// `ln(N / df) + 1`.
    pub fn idf(&self, term: &str) -> f64 {
        let n = self.n_docs.max(1) as f64;
        let df = self.df(term).max(1) as f64;
        (n / df).ln() + 1.0
    }

    pub fn vector(&self, counts: &TermCounts) -> SparseVector {
        counts
            .iter()
            .map(|(t, &c)| (t.clone(), c as f64 * self.idf(t)))
            .collect()
    }
}

pub fn sparse_cosine(a: &SparseVector, b: &SparseVector) -> f64 {
    let norm = |v: &SparseVector| v.values().map(|x| x * x).sum::<f64>().sqrt();
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let dot: f64 = a
        .iter()
        .filter_map(|(t, x)| b.get(t).map(|y| x * y))
        .sum();
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

/// Cosine of the tf-idf vectors of the two topics' concatenated questions.
/// Every non-empty topic document in the view counts toward document frequency.
pub fn tfidf_cosine(v: &SnapshotView<'_>, t1: &TopicId, t2: &TopicId) -> Result<f64> {
    let a = topic_term_counts(v, t1)?;
    let b = topic_term_counts(v, t2)?;
    let docs = v
        .base()
        .topics()
        .map(|t| topic_term_counts(v, &t.id))
        .collect::<Result<Vec<_>>>()?;
    let df = DocumentFrequencies::from_documents(&docs);
    Ok(sparse_cosine(&df.vector(&a), &df.vector(&b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(words: &[(&str, usize)]) -> TermCounts {
        words.iter().map(|&(w, c)| (w.to_string(), c)).collect()
    }

    #[test]
    fn idf_matches_smoothed_log() {
        let docs = [counts(&[("a", 1), ("b", 2)]), counts(&[("a", 3)]), TermCounts::new()];
        let df = DocumentFrequencies::from_documents(&docs);
        assert_eq!(df.n_docs(), 2);
        assert!((df.idf("a") - 1.0).abs() < 1e-12);
        assert!((df.idf("b") - (2.0f64.ln() + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn cosine_identity_and_orthogonality() {
        let a: SparseVector = [("x".to_string(), 1.0), ("y".to_string(), 2.0)].into();
        let b: SparseVector = [("z".to_string(), 1.0)].into();
        assert!((sparse_cosine(&a, &a) - 1.0).abs() < 1e-12);
        assert_eq!(sparse_cosine(&a, &b), 0.0);
        assert_eq!(sparse_cosine(&a, &SparseVector::new()), 0.0);
    }
}
