//! Corpus-wide token index shared by every snapshot of one corpus.

use std::collections::{HashMap, HashSet};

use crate::corpus::{Corpus, Timestamp, TopicId};
use crate::textfeat::{tokenize, PosTagger};

/// Interned question and name tokens plus timestamp lists that answer
/// document-frequency and corpus-frequency queries for any cutoff.
pub struct CorpusIndex {
    vocab: HashMap<String, u32>,
    words: Vec<String>,
    question_tokens: Vec<Vec<u32>>,
    question_pos: Vec<[u64; 12]>,
    question_times: Vec<Timestamp>,
    topic_ids: Vec<TopicId>,
    topic_pos: HashMap<TopicId, usize>,
    names: Vec<String>,
    name_tokens: Vec<Vec<u32>>,
    word_times: Vec<Vec<Timestamp>>,
    df_times: Vec<Vec<Timestamp>>,
    doc_times: Vec<Timestamp>,
}

impl CorpusIndex {
    pub fn new(c: &Corpus, tagger: &dyn PosTagger) -> Self {
        let mut vocab = HashMap::new();
        let mut words = Vec::new();
        let mut intern = |w: String| -> u32 {
            if let Some(&id) = vocab.get(&w) {
                return id;
            }
            let id = words.len() as u32;
            words.push(w.clone());
            vocab.insert(w, id);
            id
        };

        let mut question_tokens = Vec::with_capacity(c.questions().len());
        let mut question_pos = Vec::with_capacity(c.questions().len());
        for q in c.questions() {
            let toks = tokenize(&q.text);
            let mut counts = [0u64; 12];
            for tag in tagger.tag(toks.tokens()) {
                counts[tag.index()] += 1;
            }
            question_pos.push(counts);
            question_tokens.push(toks.into_inner().into_iter().map(&mut intern).collect::<Vec<_>>());
        }
        let topic_ids: Vec<TopicId> = c.topics().map(|t| t.id.clone()).collect();
        let names: Vec<String> = c.topics().map(|t| t.name.clone()).collect();
        let name_tokens = names
            .iter()
            .map(|n| tokenize(n).into_inner().into_iter().map(&mut intern).collect())
            .collect();
        let topic_pos = topic_ids.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();

        let mut word_times = vec![Vec::new(); words.len()];
        for (q, toks) in c.questions().iter().zip(&question_tokens) {
            for &w in toks {
                word_times[w as usize].push(q.created_at);
            }
        }
        let mut df_times = vec![Vec::new(); words.len()];
        let mut doc_times = Vec::new();
        let full = c.full_view();
        for t in &topic_ids {
            let mut seen = HashSet::new();
            let mut first_doc = None;
            for &qi in full.question_indices(t).unwrap_or(&[]) {
                let at = c.questions()[qi].created_at;
                for &w in &question_tokens[qi] {
                    first_doc.get_or_insert(at);
                    if seen.insert(w) {
                        df_times[w as usize].push(at);
                    }
                }
            }
            doc_times.extend(first_doc);
        }
        for v in word_times.iter_mut().chain(df_times.iter_mut()) {
            v.sort_unstable();
        }
        doc_times.sort_unstable();

        CorpusIndex {
            vocab,
            words,
            question_tokens,
            question_pos,
            question_times: c.questions().iter().map(|q| q.created_at).collect(),
            topic_ids,
            topic_pos,
            names,
            name_tokens,
            word_times,
            df_times,
            doc_times,
        }
    }

    pub fn word_id(&self, w: &str) -> Option<u32> {
        self.vocab.get(w).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn vocab_len(&self) -> usize {
        self.words.len()
    }

    pub fn question_tokens(&self, q: usize) -> &[u32] {
        &self.question_tokens[q]
    }

    pub fn question_pos(&self, q: usize) -> &[u64; 12] {
        &self.question_pos[q]
    }

    pub fn question_time(&self, q: usize) -> Timestamp {
        self.question_times[q]
    }

    pub fn topic_count(&self) -> usize {
        self.topic_ids.len()
    }

    pub fn topic_index(&self, t: &TopicId) -> Option<usize> {
        self.topic_pos.get(t).copied()
    }

    pub fn topic_id(&self, i: usize) -> &TopicId {
        &self.topic_ids[i]
    }

    pub fn topic_name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn name_tokens(&self, i: usize) -> &[u32] {
        &self.name_tokens[i]
    }

    /// Occurrences of `w` in questions dated at or before `cutoff`.
    pub fn corpus_count(&self, w: u32, cutoff: Timestamp) -> usize {
        self.word_times[w as usize].partition_point(|&t| t <= cutoff)
    }

    /// Topics whose visible questions contain `w`.
    pub fn df(&self, w: u32, cutoff: Timestamp) -> usize {
        self.df_times[w as usize].partition_point(|&t| t <= cutoff)
    }

    /// Topics with at least one visible token.
    pub fn n_docs(&self, cutoff: Timestamp) -> usize {
        self.doc_times.partition_point(|&t| t <= cutoff)
    }

    /// `ln(N / df) + 1`, matching [`crate::textfeat::DocumentFrequencies::idf`].
    pub fn idf(&self, w: u32, cutoff: Timestamp) -> f64 {
        let n = self.n_docs(cutoff).max(1) as f64;
        let df = self.df(w, cutoff).max(1) as f64;
        (n / df).ln() + 1.0
    }
}
