//! Pretrained word vectors and topic document vectors.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::corpus::{SnapshotView, TopicId};
use crate::error::{Error, Result};
use crate::textfeat::{tokenize, DocumentFrequencies, TermCounts};

/// Default minimum corpus frequency for a word to contribute.
pub const DEFAULT_MIN_COUNT: usize = 5;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VectorTable {
    dim: usize,
    words: HashMap<String, Vec<f64>>,
}

impl VectorTable {
    pub fn new(dim: usize) -> Self {
        VectorTable {
            dim,
            words: HashMap::new(),
        }
    }

    /// Inserts unless the word is already present. Returns whether it was added.
    pub fn insert(&mut self, word: &str, vector: Vec<f64>) -> Result<bool> {
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: vector.len(),
            });
        }
        if self.words.contains_key(word) {
            return Ok(false);
        }
        self.words.insert(word.to_string(), vector);
        Ok(true)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.words.get(word).map(Vec::as_slice)
    }
}

/// Reads `word v1 .. vd` lines. An optional `count dim` header is skipped and
/// the first occurrence of a repeated word wins.
pub fn load_vectors(path: &Path) -> Result<VectorTable> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut table: Option<VectorTable> = None;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if i == 0 && fields.len() == 2 && fields.iter().all(|f| f.parse::<u64>().is_ok()) {
            continue;
        }
        if fields.len() < 2 {
            return Err(Error::malformed(path, i + 1, "expected a word followed by its vector"));
        }
        let vector = fields[1..]
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::malformed(path, i + 1, e))?;
        let t = table.get_or_insert_with(|| VectorTable::new(vector.len()));
        if vector.len() != t.dim {
            return Err(Error::malformed(
                path,
                i + 1,
                format!("dimension {} differs from {}", vector.len(), t.dim),
            ));
        }
        t.insert(fields[0], vector)?;
    }
    Ok(table.unwrap_or_default())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Weighting {
    /// Plain average of the word vectors of every question token.
    Uniform,
    /// Average weighted by each word's tf-idf within the topic document.
    TfIdf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DocVector {
    pub vector: Vec<f64>,
    /// Number of token occurrences that contributed.
    pub count: usize,
}

/// Builds a document vector from a topic's term counts. Words whose global
/// frequency is below `min_count`, or that have no vector, are skipped.
pub fn doc_vector_from_counts(
    counts: &TermCounts,
    tab: &VectorTable,
    weighting: Weighting,
    min_count: usize,
    global_freq: &TermCounts,
    df: &DocumentFrequencies,
) -> DocVector {
    let mut sum = vec![0.0; tab.dim()];
    let mut weight_total = 0.0;
    let mut count = 0;
    for (word, &tf) in counts {
        if global_freq.get(word).copied().unwrap_or(0) < min_count {
            continue;
        }
        let Some(vec) = tab.get(word) else {
            continue;
        };
        let w = match weighting {
            Weighting::Uniform => tf as f64,
            Weighting::TfIdf => tf as f64 * df.idf(word),
        };
        for (s, x) in sum.iter_mut().zip(vec) {
            *s += w * x;
        }
        weight_total += w;
        count += tf;
    }
    if weight_total > 0.0 {
        for s in &mut sum {
            *s /= weight_total;
        }
    }
    DocVector { vector: sum, count }
}

/// Word counts over every question visible in the view.
pub fn global_word_counts(v: &SnapshotView<'_>) -> TermCounts {
    let mut counts = TermCounts::new();
    for q in v.questions() {
        for tok in tokenize(&q.text).into_inner() {
            *counts.entry(tok).or_insert(0) += 1;
        }
    }
    counts
}

pub fn doc_vector(
    v: &SnapshotView<'_>,
    t: &TopicId,
    tab: &VectorTable,
    weighting: Weighting,
    min_count: usize,
) -> Result<DocVector> {
    let counts = crate::textfeat::topic_term_counts(v, t)?;
    let global = global_word_counts(v);
    let docs = v
        .base()
        .topics()
        .map(|x| crate::textfeat::topic_term_counts(v, &x.id))
        .collect::<Result<Vec<_>>>()?;
    let df = DocumentFrequencies::from_documents(&docs);
    Ok(doc_vector_from_counts(&counts, tab, weighting, min_count, &global, &df))
}

/// Cosine similarity; 0 when either vector has zero norm.
pub fn cosine(u: &[f64], w: &[f64]) -> Result<f64> {
    if u.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            actual: w.len(),
        });
    }
    let dot: f64 = u.iter().zip(w).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nw = w.iter().map(|b| b * b).sum::<f64>().sqrt();
    if nu == 0.0 || nw == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (nu * nw)).clamp(-1.0, 1.0))
}
