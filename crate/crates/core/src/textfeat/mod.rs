//! Text features: tokenization, n-gram overlaps, string similarity, tf-idf,
//! part-of-speech vectors and frequency-banded word overlap.

mod jaro;
mod ngram;
mod pos;
mod tfidf;

use std::collections::HashSet;
use std::fs;
use std::path::Path;

pub use jaro::{abbreviation_pair, jaro, jaro_winkler};
pub use ngram::{
    band_words, counts_overlap, freq_stratified_overlap, name_in_text_overlap, overlap, set_overlap, stratified_overlap,
    Band, NGramMultiset, OverlapMode,
};
pub use pos::{pos_cosine, PosTag, PosTagger, PosVector, RuleTagger, TAGSET};
pub use tfidf::{sparse_cosine, tfidf_cosine, topic_term_counts, DocumentFrequencies, SparseVector, TermCounts};

use crate::error::{Error, Result};

/// Lowercased word tokens. Never contains empty tokens or whitespace.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }
}

impl<S: Into<String>> FromIterator<S> for TokenSeq {
    /// Tokens are taken verbatim; callers are responsible for the invariants.
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenSeq(iter.into_iter().map(Into::into).filter(|s: &String| !s.is_empty()).collect())
    }
}

/// Splits on non-alphanumeric characters and lowercases. Digits are kept.
pub fn tokenize(text: &str) -> TokenSeq {
    TokenSeq(
        text.split(|c: char| !c.is_alphanumeric())
            .filter(|s| !s.is_empty())
            .map(str::to_lowercase)
            .collect(),
    )
}

/// Tokenizer with an optional stopword list. Stopwords are off by default.
#[derive(Clone, Debug, Default)]
pub struct Tokenizer {
    stopwords: Option<HashSet<String>>,
}

impl Tokenizer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_stopwords(words: impl IntoIterator<Item = String>) -> Self {
        Tokenizer {
            stopwords: Some(words.into_iter().map(|w| w.to_lowercase()).collect()),
        }
    }

    /// One stopword per line; blank lines ignored.
    pub fn from_stopword_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::with_stopwords(
            text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from),
        ))
    }

    pub fn tokenize(&self, text: &str) -> TokenSeq {
        let mut seq = tokenize(text);
        if let Some(stop) = &self.stopwords {
            seq.0.retain(|t| !stop.contains(t));
        }
        seq
    }
}
