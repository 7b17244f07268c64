use crate::corpus::{SnapshotView, TopicId};
use crate::error::Result;

use super::tokenize;

/// Coarse universal part-of-speech tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PosTag {
    Noun,
    Verb,
    Adj,
    Adv,
    Pron,
    Det,
    Adp,
    Num,
    Conj,
    Prt,
    Punct,
    Other,
}

pub const TAGSET: [PosTag; 12] = [
    PosTag::Noun,
    PosTag::Verb,
    PosTag::Adj,
    PosTag::Adv,
    PosTag::Pron,
    PosTag::Det,
    PosTag::Adp,
    PosTag::Num,
    PosTag::Conj,
    PosTag::Prt,
    PosTag::Punct,
    PosTag::Other,
];

impl PosTag {
    pub fn index(self) -> usize {
        self as usize
    }
}

pub trait PosTagger: Send + Sync {
    /// One tag per token.
    fn tag(&self, tokens: &[String]) -> Vec<PosTag>;
}

/// Closed-class lexicon plus suffix heuristics. Unknown open-class words
/// default to nouns.
#[derive(Clone, Copy, Debug, Default)]
pub struct RuleTagger;

const PRONOUNS: &[&str] = &[
    "i", "me", "my", "mine", "you", "your", "yours", "he", "him", "his", "she", "her", "hers", "it", "its",
    "we", "us", "our", "ours", "they", "them", "their", "theirs", "who", "whom", "whose", "what", "which",
    "this", "that", "these", "those", "someone", "anyone", "everyone", "something", "anything", "myself",
    "yourself", "themselves",
];
const DETERMINERS: &[&str] = &["a", "an", "the", "some", "any", "every", "each", "no", "all", "both", "another"];
const ADPOSITIONS: &[&str] = &[
    "in", "on", "at", "by", "for", "with", "about", "against", "between", "into", "through", "during",
    "before", "after", "above", "below", "from", "up", "down", "of", "off", "over", "under", "to", "than",
    "via", "without", "within", "like",
];
const CONJUNCTIONS: &[&str] = &["and", "or", "but", "nor", "so", "yet", "if", "because", "while", "although", "whether"];
const PARTICLES: &[&str] = &["not", "n't", "s", "t"];
const ADVERBS: &[&str] = &[
    "how", "why", "when", "where", "very", "too", "also", "just", "ever", "never", "always", "often", "still",
    "really", "more", "most", "much", "there", "here", "now", "then", "again", "only",
];
const VERBS: &[&str] = &[
    "is", "are", "was", "were", "be", "been", "being", "am", "do", "does", "did", "have", "has", "had", "can",
    "could", "will", "would", "should", "shall", "may", "might", "must", "get", "make", "go", "know", "think",
    "take", "see", "come", "want", "use", "find", "give", "tell", "work", "learn", "become", "start", "buy",
];

fn tag_word(w: &str) -> PosTag {
    if w.chars().all(|c| c.is_ascii_digit()) {
        return PosTag::Num;
    }
    if !w.chars().any(char::is_alphanumeric) {
        return PosTag::Punct;
    }
    let lists: [(&[&str], PosTag); 7] = [
        (PRONOUNS, PosTag::Pron),
        (DETERMINERS, PosTag::Det),
        (ADPOSITIONS, PosTag::Adp),
        (CONJUNCTIONS, PosTag::Conj),
        (PARTICLES, PosTag::Prt),
        (ADVERBS, PosTag::Adv),
        (VERBS, PosTag::Verb),
    ];
    for (list, tag) in lists {
        if list.contains(&w) {
            return tag;
        }
    }
    if !w.chars().any(char::is_alphabetic) {
        return PosTag::Other;
    }
    let len = w.chars().count();
    let ends = |suffixes: &[&str]| suffixes.iter().any(|s| w.ends_with(s) && len > s.len() + 2);
    if ends(&["ly"]) {
        PosTag::Adv
    } else if ends(&["ing", "ed", "ize", "ise", "ify", "ate"]) {
        PosTag::Verb
    } else if ends(&["ous", "ful", "able", "ible", "al", "ive", "ic", "less", "ish"]) {
        PosTag::Adj
    } else {
        PosTag::Noun
    }
}

impl PosTagger for RuleTagger {
    fn tag(&self, tokens: &[String]) -> Vec<PosTag> {
        tokens.iter().map(|t| tag_word(t)).collect()
    }
}

/// Tag counts over the fixed tagset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PosVector {
    counts: [u64; 12],
}

impl PosVector {
    pub fn from_counts(counts: [u64; 12]) -> Self {
        PosVector { counts }
    }

    pub fn add_tokens(&mut self, tokens: &[String], tagger: &dyn PosTagger) {
        for tag in tagger.tag(tokens) {
            self.counts[tag.index()] += 1;
        }
    }

    pub fn counts(&self) -> &[u64; 12] {
        &self.counts
    }

    pub fn cosine(&self, other: &PosVector) -> f64 {
        let dot: f64 = self.counts.iter().zip(&other.counts).map(|(&a, &b)| a as f64 * b as f64).sum();
        let na = self.counts.iter().map(|&a| (a as f64).powi(2)).sum::<f64>().sqrt();
        let nb = other.counts.iter().map(|&b| (b as f64).powi(2)).sum::<f64>().sqrt();
        if na == 0.0 || nb == 0.0 {
            0.0
        } else {
            (dot / (na * nb)).min(1.0)
        }
    }
}

pub(crate) fn topic_pos_vector(v: &SnapshotView<'_>, t: &TopicId, tagger: &dyn PosTagger) -> Result<PosVector> {
    let mut out = PosVector::default();
    for q in v.questions_of(t)? {
        out.add_tokens(tokenize(&q.text).tokens(), tagger);
    }
    Ok(out)
}

/// Cosine between the POS tag count vectors of two topics' questions.
pub fn pos_cosine(v: &SnapshotView<'_>, t1: &TopicId, t2: &TopicId, tagger: &dyn PosTagger) -> Result<f64> {
    let a = topic_pos_vector(v, t1, tagger)?;
    let b = topic_pos_vector(v, t2, tagger)?;
    Ok(a.cosine(&b))
}
