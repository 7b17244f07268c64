use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::tfidf::{topic_term_counts, TermCounts};
use super::TokenSeq;
use crate::corpus::{SnapshotView, TopicId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OverlapMode {
    /// Each common element counts once.
    Unweighted,
    /// Each common element counts with its minimum frequency on both sides.
    Weighted,
}

/// Contiguous n-grams with multiplicity. Grams are stored as their tokens
/// joined by a single space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NGramMultiset {
    n: usize,
    counts: HashMap<String, usize>,
    total: usize,
}

impl NGramMultiset {
    pub fn empty(n: usize) -> Self {
        assert!(n >= 1, "n-gram order must be at least 1");
        NGramMultiset {
            n,
            counts: HashMap::new(),
            total: 0,
        }
    }

    pub fn from_tokens(tokens: &TokenSeq, n: usize) -> Self {
        let mut m = Self::empty(n);
        m.extend_from(tokens);
        m
    }

    /// Adds the n-grams of one more token sequence. Grams never span two
    /// sequences.
    pub fn extend_from(&mut self, tokens: &TokenSeq) {
        for w in tokens.tokens().windows(self.n) {
            *self.counts.entry(w.join(" ")).or_insert(0) += 1;
            self.total += 1;
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn count(&self, gram: &str) -> usize {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    /// Number of distinct grams.
    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    /// Number of gram occurrences.
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.counts.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

/// Overlap coefficient of two n-gram multisets. Empty sides give 0.
pub fn overlap(a: &NGramMultiset, b: &NGramMultiset, mode: OverlapMode) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::OrderMismatch { left: a.n, right: b.n });
    }
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let (small, large) = if a.counts.len() <= b.counts.len() { (a, b) } else { (b, a) };
    Ok(match mode {
        OverlapMode::Unweighted => {
            let common = small.counts.keys().filter(|k| large.counts.contains_key(*k)).count();
            common as f64 / a.support_len().min(b.support_len()) as f64
        }
        OverlapMode::Weighted => {
            let common: usize = small
                .counts
                .iter()
                .map(|(k, &c)| c.min(large.count(k)))
                .sum();
            common as f64 / a.total.min(b.total) as f64
        }
    })
}

/// Unweighted overlap coefficient of two plain sets.
pub fn set_overlap<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    a.intersection(b).count() as f64 / a.len().min(b.len()) as f64
}

/// Overlap coefficient of two count maps, with the same semantics as
/// [`overlap`] for n-gram multisets.
pub fn counts_overlap<K: Ord>(a: &BTreeMap<K, usize>, b: &BTreeMap<K, usize>, mode: OverlapMode) -> f64 {
    let total = |m: &BTreeMap<K, usize>| m.values().sum::<usize>();
    let (ta, tb) = (total(a), total(b));
    if ta == 0 || tb == 0 {
        return 0.0;
    }
    match mode {
        OverlapMode::Unweighted => {
            let sa = a.iter().filter(|(_, &c)| c > 0).count();
            let sb = b.iter().filter(|(_, &c)| c > 0).count();
            let common = a.iter().filter(|(k, &c)| c > 0 && b.get(*k).is_some_and(|&d| d > 0)).count();
            common as f64 / sa.min(sb) as f64
        }
        OverlapMode::Weighted => {
            let common: usize = a.iter().map(|(k, &c)| c.min(b.get(k).copied().unwrap_or(0))).sum();
            common as f64 / ta.min(tb) as f64
        }
    }
}

/// Overlap between a topic name's n-grams and another topic's question n-grams.
pub fn name_in_text_overlap(
    name_tokens: &TokenSeq,
    other_questions: &NGramMultiset,
    n: usize,
    mode: OverlapMode,
) -> Result<f64> {
    overlap(&NGramMultiset::from_tokens(name_tokens, n), other_questions, mode)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Band {
    Top20,
    Bottom20,
}

/// The most (or least) frequent fifth of the distinct words, at least one.
/// Ties are broken lexicographically.
pub fn band_words(counts: &TermCounts, band: Band) -> BTreeSet<String> {
    let mut words: Vec<(&String, usize)> = counts.iter().map(|(w, &c)| (w, c)).collect();
    match band {
        Band::Top20 => words.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0))),
        Band::Bottom20 => words.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(b.0))),
    }
    let keep = words.len().div_ceil(5);
    words.into_iter().take(keep).map(|(w, _)| w.clone()).collect()
}

pub fn stratified_overlap(a: &TermCounts, b: &TermCounts, band: Band) -> f64 {
    set_overlap(&band_words(a, band), &band_words(b, band))
}

/// Unweighted overlap of the two topics' frequency-banded question words.
pub fn freq_stratified_overlap(v: &SnapshotView<'_>, t1: &TopicId, t2: &TopicId, band: Band) -> Result<f64> {
    let a = topic_term_counts(v, t1)?;
    let b = topic_term_counts(v, t2)?;
    Ok(stratified_overlap(&a, &b, band))
}
