//! Seeded synthetic corpora with planted merge, neighbor and unmerge pairs.
//!
//! Topics are organised around latent concepts. Each concept owns a small
//! vocabulary; questions mix concept words, category words and a shared
//! background. A planted merge pair draws both topics from one concept and
//! places them side by side in the generated ontology. Unmerge pairs come from
//! clusters of distinct concepts that share part of their vocabulary.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, LogNormal, Normal, Poisson, Zipf};
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Event, EventKind, Question, Timestamp, Topic, TopicId};
use crate::embed::VectorTable;
use crate::error::{Error, Result};
use crate::ontology::{Ontology, OntologyBuilder};
use crate::pipeline::{canonical_pair, write_truth, PairKind, TruthRecord};

pub const TRUTH_FILE: &str = "ground_truth.jsonl";
pub const EMBEDDINGS_FILE: &str = "embeddings.vec";
pub const TAXONOMY_FILE: &str = "taxonomy.tsv";

const DAY: i64 = 86_400;
const TAXONOMY_ROOT: &str = "entity.n.01";
const SENSES_PER_DOMAIN: usize = 3;
const GENERAL_GROUPS: usize = 8;

const FUNCTION_WORDS: &[&str] = &[
    "what", "is", "the", "how", "do", "i", "a", "to", "in", "of", "for", "are", "can", "why", "best", "you", "does",
    "which", "on", "my", "be", "it", "with", "and", "get", "should", "there", "way", "some", "about", "good",
    "when", "who", "most", "people", "make", "will", "or", "from",
];
const CONSONANTS: &[u8] = b"bcdfghjklmnprstvz";
const VOWELS: &[u8] = b"aeiou";

/// Direction asymmetries between the surviving and the absorbed topic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionSignal {
    pub winner_name_chars: f64,
    pub loser_name_chars: f64,
    pub name_chars_sd: f64,
    /// Mean question count before the merge.
    pub winner_questions: f64,
    pub loser_questions: f64,
    /// Mean answers per question.
    pub winner_answers: f64,
    pub loser_answers: f64,
    /// Probability that the older topic survives.
    pub older_wins: f64,
}

impl Default for DirectionSignal {
    fn default() -> Self {
        DirectionSignal {
            winner_name_chars: 23.6,
            loser_name_chars: 16.5,
            name_chars_sd: 4.0,
            winner_questions: 82.0,
            loser_questions: 22.0,
            winner_answers: 2.5,
            loser_answers: 1.5,
            older_wins: 0.67,
        }
    }
}

impl DirectionSignal {
    /// Winner and loser drawn from the same distributions.
    pub fn none() -> Self {
        DirectionSignal {
            winner_name_chars: 20.0,
            loser_name_chars: 20.0,
            winner_questions: 40.0,
            loser_questions: 40.0,
            winner_answers: 2.0,
            loser_answers: 2.0,
            older_wins: 0.5,
            ..DirectionSignal::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub topics: usize,
    pub categories: usize,
    pub facets_per_category: usize,
    pub popular_topics: usize,
    /// Broad topics outside every category, named after frequent background words.
    pub generic_topics: usize,
    pub merges: usize,
    pub neighbors: usize,
    pub unmerges: usize,
    /// Topics per unmerge cluster; every pair inside a cluster is an unmerge.
    pub decoy_cluster: usize,
    /// Sampled negative test pairs a caller should request downstream.
    pub generated_negatives: usize,
    /// Log-normal question count of ordinary topics.
    pub questions_mean: f64,
    pub questions_sigma: f64,
    pub tokens_min: usize,
    pub tokens_max: usize,
    pub concept_vocab: usize,
    pub category_vocab: usize,
    pub background_vocab: usize,
    pub concept_word_rate: f64,
    pub category_word_rate: f64,
    /// Probability that a merge pair shares one concept.
    pub shared_vocab_rate: f64,
    /// Probability that a merge pair shares category, facets and ontology parent.
    pub colocation_rate: f64,
    /// Share of concept tokens an unmerge-cluster topic takes from the cluster pool.
    pub decoy_overlap: f64,
    /// Vocabulary pools shared across categories.
    pub themes: usize,
    /// Probability that a topic borrows from one theme.
    pub theme_rate: f64,
    /// Share of concept tokens a themed topic takes from its theme.
    pub theme_share: f64,
    /// Probability that a themed topic's name starts with a theme word.
    pub theme_name_rate: f64,
    /// Per-question probabilities of extra tags: the category hub, each of
    /// the topic's facets, one popular topic, one random topic.
    pub hub_tag_rate: f64,
    pub facet_tag_rate: f64,
    pub popular_tag_rate: f64,
    pub stray_tag_rate: f64,
    /// Own questions of every hub, facet and popular topic.
    pub structural_questions: usize,
    pub direction: DirectionSignal,
    pub lag_mean_days: f64,
    /// Corpus start, `YYYY-MM-DD`.
    pub start: String,
    pub span_days: i64,
    pub embedding_dim: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 7,
            topics: 500,
            categories: 5,
            facets_per_category: 10,
            popular_topics: 5,
            generic_topics: 0,
            merges: 150,
            neighbors: 600,
            unmerges: 150,
            decoy_cluster: 4,
            generated_negatives: 20_000,
            questions_mean: 40.0,
            questions_sigma: 0.5,
            tokens_min: 6,
            tokens_max: 12,
            concept_vocab: 30,
            category_vocab: 60,
            background_vocab: 400,
            concept_word_rate: 0.45,
            category_word_rate: 0.15,
            shared_vocab_rate: 1.0,
            colocation_rate: 1.0,
            decoy_overlap: 0.5,
            themes: 0,
            theme_rate: 0.8,
            theme_share: 0.4,
            theme_name_rate: 0.5,
            hub_tag_rate: 0.4,
            facet_tag_rate: 0.35,
            popular_tag_rate: 0.5,
            stray_tag_rate: 0.05,
            structural_questions: 8,
            direction: DirectionSignal::default(),
            lag_mean_days: 936.0,
            start: "2009-01-01".into(),
            span_days: 2922,
            embedding_dim: 50,
        }
    }
}

impl SynthConfig {
    /// Every signal knob at zero: merge partners are unrelated topics.
    pub fn without_signal(seed: u64) -> Self {
        SynthConfig {
            seed,
            shared_vocab_rate: 0.0,
            colocation_rate: 0.0,
            decoy_overlap: 0.0,
            direction: DirectionSignal::none(),
            ..SynthConfig::default()
        }
    }

    fn pairs_per_cluster(&self) -> usize {
        self.decoy_cluster * self.decoy_cluster.saturating_sub(1) / 2
    }

    fn decoy_clusters(&self) -> usize {
        match self.pairs_per_cluster() {
            0 => 0,
            p => self.unmerges.div_ceil(p),
        }
    }

    /// Topics left over for plain, unpaired concepts.
    fn plain_topics(&self) -> Result<usize> {
        let fixed = 1
            + self.categories
            + self.categories * self.facets_per_category
            + self.popular_topics
            + self.generic_topics
            + 2 * self.merges
            + self.decoy_clusters() * self.decoy_cluster;
        self.topics.checked_sub(fixed).ok_or_else(|| {
            Error::InvalidConfig(format!(
                "{} topics cannot hold the structural topics, {} merge pairs and {} unmerge pairs ({fixed} needed)",
                self.topics, self.merges, self.unmerges
            ))
        })
    }

    fn start_ts(&self) -> Result<Timestamp> {
        NaiveDate::parse_from_str(&self.start, "%Y-%m-%d")
            .ok()
            .and_then(|d| d.and_hms_opt(0, 0, 0))
            .map(|d| d.and_utc().timestamp())
            .ok_or_else(|| Error::InvalidConfig(format!("bad start date `{}`", self.start)))
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("concept_word_rate", self.concept_word_rate),
            ("category_word_rate", self.category_word_rate),
            ("shared_vocab_rate", self.shared_vocab_rate),
            ("colocation_rate", self.colocation_rate),
            ("decoy_overlap", self.decoy_overlap),
            ("theme_rate", self.theme_rate),
            ("theme_share", self.theme_share),
            ("theme_name_rate", self.theme_name_rate),
            ("hub_tag_rate", self.hub_tag_rate),
            ("facet_tag_rate", self.facet_tag_rate),
            ("popular_tag_rate", self.popular_tag_rate),
            ("stray_tag_rate", self.stray_tag_rate),
            ("older_wins", self.direction.older_wins),
        ];
        for (name, r) in rates {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidConfig(format!("{name} = {r} is outside [0, 1]")));
            }
        }
        if self.concept_word_rate + self.category_word_rate > 1.0 {
            return Err(Error::InvalidConfig("concept and category word rates exceed 1".into()));
        }
        let positive = [
            ("questions_mean", self.questions_mean),
            ("lag_mean_days", self.lag_mean_days),
            ("winner_questions", self.direction.winner_questions),
            ("loser_questions", self.direction.loser_questions),
            ("winner_name_chars", self.direction.winner_name_chars),
            ("loser_name_chars", self.direction.loser_name_chars),
        ];
        for (name, x) in positive {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {x}")));
            }
        }
        let non_negative = [
            ("questions_sigma", self.questions_sigma),
            ("name_chars_sd", self.direction.name_chars_sd),
            ("winner_answers", self.direction.winner_answers),
            ("loser_answers", self.direction.loser_answers),
        ];
        for (name, x) in non_negative {
            if !(x.is_finite() && x >= 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be non-negative, got {x}")));
            }
        }
        if self.categories == 0 || self.facets_per_category < 2 {
            return Err(Error::InvalidConfig("need at least one category with two facets".into()));
        }
        if self.unmerges > 0 && self.decoy_cluster < 2 {
            return Err(Error::InvalidConfig("unmerge clusters need at least two topics".into()));
        }
        if self.tokens_min == 0 || self.tokens_min > self.tokens_max {
            return Err(Error::InvalidConfig("token range must satisfy 1 <= min <= max".into()));
        }
        if self.concept_vocab == 0 || self.category_vocab < 1 + self.facets_per_category * 3 {
            return Err(Error::InvalidConfig("vocabulary sizes too small".into()));
        }
        if self.embedding_dim == 0 {
            return Err(Error::InvalidConfig("embedding_dim must be positive".into()));
        }
        if self.span_days < 365 {
            return Err(Error::InvalidConfig("span_days must cover at least a year".into()));
        }
        self.start_ts()?;
        self.plain_topics()?;
        Ok(())
    }
}

/// Everything the generator emits.
#[derive(Debug)]
pub struct SynthOutput {
    pub corpus: Corpus,
    pub truth: Vec<TruthRecord>,
    /// Word vectors in vocabulary order.
    pub embeddings: Vec<(String, Vec<f64>)>,
    /// `child, parent` edges of the word taxonomy.
    pub taxonomy: Vec<(String, String)>,
}

impl SynthOutput {
    pub fn vector_table(&self) -> Result<VectorTable> {
        let dim = self.embeddings.first().map_or(1, |e| e.1.len());
        let mut t = VectorTable::new(dim);
        for (w, v) in &self.embeddings {
            t.insert(w, v.clone())?;
        }
        Ok(t)
    }

    pub fn taxonomy_ontology(&self) -> Result<Ontology> {
        let mut b = OntologyBuilder::new();
        for (c, p) in &self.taxonomy {
            b.add_edge(c, p)?;
        }
        Ok(b.build())
    }

    /// Writes the corpus files, ground truth, vectors and taxonomy.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.corpus.write_dir(dir)?;
        write_truth(&dir.join(TRUTH_FILE), &self.truth)?;

        let path = dir.join(EMBEDDINGS_FILE);
        let mut out = BufWriter::new(fs::File::create(&path).map_err(|e| Error::io(&path, e))?);
        let dim = self.embeddings.first().map_or(0, |e| e.1.len());
        let mut write = || -> std::io::Result<()> {
            writeln!(out, "{} {}", self.embeddings.len(), dim)?;
            for (w, v) in &self.embeddings {
                write!(out, "{w}")?;
                for x in v {
                    write!(out, " {x:.5}")?;
                }
                writeln!(out)?;
            }
            out.flush()
        };
        write().map_err(|e| Error::io(&path, e))?;

        let path = dir.join(TAXONOMY_FILE);
        let mut out = BufWriter::new(fs::File::create(&path).map_err(|e| Error::io(&path, e))?);
        let mut write = || -> std::io::Result<()> {
            for (c, p) in &self.taxonomy {
                writeln!(out, "{c}\t{p}")?;
            }
            out.flush()
        };
        write().map_err(|e| Error::io(&path, e))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Root,
    Hub,
    Facet,
    Popular,
    Generic,
    Winner(usize),
    Loser(usize),
    Decoy(usize),
    Plain,
}

impl Role {
    fn pairable(self) -> bool {
        matches!(self, Role::Winner(_) | Role::Loser(_) | Role::Decoy(_) | Role::Plain | Role::Generic)
    }
}

struct Proto {
    name: String,
    role: Role,
    created: Timestamp,
    category: Option<usize>,
    parent: Option<usize>,
    concept: usize,
    /// Cluster pool concept for unmerge-cluster topics.
    pool: Option<usize>,
    theme: Option<usize>,
    facets: Vec<usize>,
    /// Question windows `(from, to, count)`.
    windows: Vec<(Timestamp, Timestamp, usize)>,
    answers: f64,
}

struct Concept {
    words: Vec<String>,
    centroid: Vec<f64>,
    category: Option<usize>,
}

struct Words {
    used: HashSet<String>,
}

impl Words {
    fn new() -> Self {
        Words {
            used: FUNCTION_WORDS.iter().map(|w| w.to_string()).collect(),
        }
    }

    fn fresh(&mut self, rng: &mut ChaCha8Rng, len: usize) -> String {
        let len = len.max(3);
        loop {
            let mut consonant = rng.random_bool(0.6);
            let w: String = (0..len)
                .map(|_| {
                    let set = if consonant { CONSONANTS } else { VOWELS };
                    consonant = !consonant;
                    set[rng.random_range(0..set.len())] as char
                })
                .collect();
            if self.used.insert(w.clone()) {
                return w;
            }
        }
    }

    /// A name of roughly `chars` characters and its lowercase words.
    fn name(&mut self, rng: &mut ChaCha8Rng, chars: f64) -> (String, Vec<String>) {
        let chars = chars.round().clamp(4.0, 48.0) as usize;
        let k = (chars as f64 / 8.0).round().clamp(1.0, 4.0) as usize;
        let letters = chars.saturating_sub(k - 1).max(3 * k);
        let words: Vec<String> = (0..k)
            .map(|i| self.fresh(rng, letters / k + usize::from(i < letters % k)))
            .collect();
        let name = words.iter().map(|w| capitalize(w)).collect::<Vec<_>>().join(" ");
        (name, words)
    }
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn gaussian_vec(rng: &mut ChaCha8Rng, dim: usize, sd: f64) -> Vec<f64> {
    let n = Normal::new(0.0, sd).expect("finite sd");
    (0..dim).map(|_| n.sample(rng)).collect()
}

fn lognormal_count(rng: &mut ChaCha8Rng, mean: f64, sigma: f64) -> usize {
    let d = LogNormal::new(mean.ln() - sigma * sigma / 2.0, sigma).expect("valid lognormal");
    (d.sample(rng).round() as usize).max(3)
}

fn uniform_ts(rng: &mut ChaCha8Rng, from: Timestamp, to: Timestamp) -> Timestamp {
    if to <= from {
        from
    } else {
        rng.random_range(from..to)
    }
}

struct Generator<'a> {
    cfg: &'a SynthConfig,
    rng: ChaCha8Rng,
    words: Words,
    concepts: Vec<Concept>,
    protos: Vec<Proto>,
    end: Timestamp,
}

impl Generator<'_> {
    fn concept(&mut self, category: Option<usize>, mut words: Vec<String>, size: usize, word_len: (usize, usize)) -> usize {
        while words.len() < size {
            let len = self.rng.random_range(word_len.0..=word_len.1);
            words.push(self.words.fresh(&mut self.rng, len));
        }
        let centroid = gaussian_vec(&mut self.rng, self.cfg.embedding_dim, 1.0);
        self.concepts.push(Concept {
            words,
            centroid,
            category,
        });
        self.concepts.len() - 1
    }

    fn proto(&mut self, name: String, role: Role, created: Timestamp, concept: usize) -> usize {
        self.protos.push(Proto {
            name,
            role,
            created,
            category: None,
            parent: None,
            concept,
            pool: None,
            theme: None,
            facets: Vec::new(),
            windows: Vec::new(),
            answers: (self.cfg.direction.winner_answers + self.cfg.direction.loser_answers) / 2.0,
        });
        self.protos.len() - 1
    }

    fn name_chars(&mut self, mean: f64) -> f64 {
        let sd = self.cfg.direction.name_chars_sd;
        if sd == 0.0 {
            mean
        } else {
            Normal::new(mean, sd).expect("finite").sample(&mut self.rng)
        }
    }

    /// A random facet of `category` (the ontology parent) and the facet after it.
    fn pick_facets(&mut self, facets: &[Vec<usize>], category: usize) -> Vec<usize> {
        let f = &facets[category];
        let i = self.rng.random_range(0..f.len());
        vec![f[i], f[(i + 1) % f.len()]]
    }

    fn plain_window(&mut self, p: usize) {
        let n = lognormal_count(&mut self.rng, self.cfg.questions_mean, self.cfg.questions_sigma);
        let from = self.protos[p].created;
        self.protos[p].windows.push((from, self.end, n));
    }
}

/// Generates a corpus, its ground truth, word vectors and a word taxonomy.
pub fn generate_synthetic(cfg: &SynthConfig) -> Result<SynthOutput> {
    cfg.validate()?;
    let start = cfg.start_ts()?;
    let mut g = Generator {
        cfg,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        words: Words::new(),
        concepts: Vec::new(),
        protos: Vec::new(),
        end: start + cfg.span_days * DAY,
    };

    // Background vocabulary and the structural topics.
    let (root_name, root_words) = g.words.name(&mut g.rng, 10.0);
    let mut popular_words = Vec::new();
    let mut popular_names = Vec::new();
    for _ in 0..cfg.popular_topics {
        let chars = g.name_chars(14.0);
        let (n, w) = g.words.name(&mut g.rng, chars);
        popular_names.push(n);
        popular_words.extend(w);
    }
    let mut generic_words = Vec::with_capacity(cfg.generic_topics);
    for _ in 0..cfg.generic_topics {
        let len = g.rng.random_range(4..=8);
        generic_words.push(g.words.fresh(&mut g.rng, len));
    }
    let mut bg: Vec<String> = FUNCTION_WORDS[..10].iter().map(|w| w.to_string()).collect();
    for (i, w) in generic_words.iter().enumerate() {
        bg.push(w.clone());
        if let Some(f) = FUNCTION_WORDS.get(10 + i) {
            bg.push(f.to_string());
        }
    }
    bg.extend(FUNCTION_WORDS.iter().skip(10 + generic_words.len()).map(|w| w.to_string()));
    bg.extend(root_words);
    bg.extend(popular_words);
    let background = g.concept(None, bg, FUNCTION_WORDS.len() + cfg.background_vocab, (4, 8));

    let themes: Vec<usize> = (0..cfg.themes)
        .map(|_| g.concept(None, Vec::new(), cfg.concept_vocab, (4, 9)))
        .collect();
    let root = g.proto(root_name, Role::Root, start, background);
    for n in popular_names {
        let created = start + g.rng.random_range(DAY..5 * DAY);
        let p = g.proto(n, Role::Popular, created, background);
        g.protos[p].parent = Some(root);
    }

    let mut hubs = Vec::with_capacity(cfg.categories);
    let mut facets_of: Vec<Vec<usize>> = Vec::with_capacity(cfg.categories);
    for k in 0..cfg.categories {
        let mut names = Vec::new();
        let mut words = Vec::new();
        for _ in 0..=cfg.facets_per_category {
            let chars = g.name_chars(12.0);
            let (n, w) = g.words.name(&mut g.rng, chars);
            names.push(n);
            words.extend(w);
        }
        let concept = g.concept(Some(k), words, cfg.category_vocab, (4, 9));
        let created = start + g.rng.random_range(DAY..10 * DAY);
        let mut names = names.into_iter();
        let hub = g.proto(names.next().expect("hub name"), Role::Hub, created, concept);
        g.protos[hub].category = Some(k);
        g.protos[hub].parent = Some(root);
        let mut facets = Vec::new();
        for n in names {
            let created = created + g.rng.random_range(DAY..20 * DAY);
            let f = g.proto(n, Role::Facet, created, concept);
            g.protos[f].category = Some(k);
            g.protos[f].parent = Some(hub);
            facets.push(f);
        }
        hubs.push(hub);
        facets_of.push(facets);
    }
    for &p in hubs.iter().chain(facets_of.iter().flatten()).chain(std::iter::once(&root)) {
        let created = g.protos[p].created;
        g.protos[p].windows.push((created, g.end, cfg.structural_questions));
    }
    for p in 0..g.protos.len() {
        if g.protos[p].role == Role::Popular {
            let created = g.protos[p].created;
            g.protos[p].windows.push((created, g.end, cfg.structural_questions));
        }
    }

    for w in &generic_words {
        let created = uniform_ts(&mut g.rng, start + 30 * DAY, start + 400 * DAY);
        let p = g.proto(capitalize(w), Role::Generic, created, background);
        g.protos[p].parent = Some(root);
        g.plain_window(p);
    }

    // Planted merge pairs.
    let d = cfg.direction.clone();
    let lag_dist = Exp::new(1.0 / cfg.lag_mean_days).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mut merge_events = Vec::with_capacity(cfg.merges);
    let mut merge_pairs = Vec::with_capacity(cfg.merges);
    let max_lag = (cfg.span_days - 120) as f64;
    for m in 0..cfg.merges {
        let lag_days = loop {
            let l = lag_dist.sample(&mut g.rng);
            if (14.0..=max_lag).contains(&l) {
                break l;
            }
        };
        let lag = (lag_days * DAY as f64) as i64;
        let created_later = uniform_ts(&mut g.rng, start + 30 * DAY, g.end - lag - 30 * DAY);
        let created_older = (created_later - g.rng.random_range(DAY..400 * DAY)).max(start + 10 * DAY);
        let at = created_later + lag;
        let older_wins = g.rng.random_bool(d.older_wins);
        let (created_w, created_l) = if older_wins {
            (created_older, created_later)
        } else {
            (created_later, created_older)
        };

        let chars = g.name_chars(d.winner_name_chars);
        let (name_w, words_w) = g.words.name(&mut g.rng, chars);
        let chars = g.name_chars(d.loser_name_chars);
        let (name_l, words_l) = g.words.name(&mut g.rng, chars);
        let category = g.rng.random_range(0..cfg.categories);
        let shared = g.rng.random_bool(cfg.shared_vocab_rate);
        let colocated = g.rng.random_bool(cfg.colocation_rate);

        let (concept_w, concept_l) = if shared {
            let mut words = words_w;
            words.extend(words_l);
            let c = g.concept(Some(category), words, cfg.concept_vocab, (4, 9));
            (c, c)
        } else {
            let cw = g.concept(Some(category), words_w, cfg.concept_vocab, (4, 9));
            let cl = g.concept(Some(category), words_l, cfg.concept_vocab, (4, 9));
            (cw, cl)
        };
        let w = g.proto(name_w, Role::Winner(m), created_w, concept_w);
        let l = g.proto(name_l, Role::Loser(m), created_l, concept_l);

        let facets_w = g.pick_facets(&facets_of, category);
        let (category_l, facets_l) = if colocated {
            (category, facets_w.clone())
        } else {
            let k = g.rng.random_range(0..cfg.categories);
            (k, g.pick_facets(&facets_of, k))
        };
        if !colocated {
            g.concepts[concept_l].category = Some(category_l);
        }
        for (p, k, f) in [(w, category, facets_w), (l, category_l, facets_l)] {
            g.protos[p].category = Some(k);
            g.protos[p].parent = Some(f[0]);
            g.protos[p].facets = f;
        }

        let pre_w = lognormal_count(&mut g.rng, d.winner_questions, cfg.questions_sigma);
        let pre_l = lognormal_count(&mut g.rng, d.loser_questions, cfg.questions_sigma);
        let post_w = ((pre_w as f64) * (g.end - at) as f64 / (at - created_w).max(DAY) as f64).round() as usize;
        g.protos[w].windows = vec![(created_w, at, pre_w), (at, g.end, post_w.min(pre_w))];
        g.protos[l].windows = vec![(created_l, at, pre_l)];
        g.protos[w].answers = d.winner_answers;
        g.protos[l].answers = d.loser_answers;

        merge_events.push((l, w, at));
        merge_pairs.push((w, l));
    }

    // Unmerge clusters.
    let mut unmerge_events = Vec::new();
    let mut cluster_members: Vec<Vec<usize>> = Vec::new();
    let mut remaining = cfg.unmerges;
    for c in 0..cfg.decoy_clusters() {
        let category = g.rng.random_range(0..cfg.categories);
        let pool = g.concept(Some(category), Vec::new(), cfg.concept_vocab, (4, 9));
        let mut members = Vec::new();
        for _ in 0..cfg.decoy_cluster {
            let chars = g.name_chars((d.winner_name_chars + d.loser_name_chars) / 2.0);
            let (name, words) = g.words.name(&mut g.rng, chars);
            let concept = g.concept(Some(category), words, cfg.concept_vocab, (4, 9));
            let created = uniform_ts(&mut g.rng, start + 30 * DAY, g.end - 240 * DAY);
            let p = g.proto(name, Role::Decoy(c), created, concept);
            let f = g.pick_facets(&facets_of, category);
            g.protos[p].category = Some(category);
            g.protos[p].parent = Some(f[0]);
            g.protos[p].facets = f;
            g.protos[p].pool = Some(pool);
            g.plain_window(p);
            members.push(p);
        }
        'pairs: for i in 0..members.len() {
            for j in i + 1..members.len() {
                if remaining == 0 {
                    break 'pairs;
                }
                remaining -= 1;
                let (a, b) = (members[i], members[j]);
                let latest = g.protos[a].created.max(g.protos[b].created);
                let at = uniform_ts(&mut g.rng, latest + 30 * DAY, g.end - 60 * DAY);
                let back = at + DAY + (g.rng.random_range(0.0..60.0) * DAY as f64) as i64;
                let (src, dst) = if g.rng.random_bool(0.5) { (a, b) } else { (b, a) };
                unmerge_events.push((src, dst, at, back.min(g.end - 1)));
            }
        }
        cluster_members.push(members);
    }

    // Plain topics fill the remaining budget.
    for _ in 0..cfg.plain_topics()? {
        let chars = g.name_chars((d.winner_name_chars + d.loser_name_chars) / 2.0);
        let (name, words) = g.words.name(&mut g.rng, chars);
        let category = g.rng.random_range(0..cfg.categories);
        let concept = g.concept(Some(category), words, cfg.concept_vocab, (4, 9));
        let created = uniform_ts(&mut g.rng, start + 30 * DAY, g.end - 240 * DAY);
        let p = g.proto(name, Role::Plain, created, concept);
        let f = g.pick_facets(&facets_of, category);
        g.protos[p].category = Some(category);
        g.protos[p].parent = Some(f[0]);
        g.protos[p].facets = f;
        g.plain_window(p);
    }

    if !themes.is_empty() {
        for p in 0..g.protos.len() {
            let role = g.protos[p].role;
            if !role.pairable() || role == Role::Generic || !g.rng.random_bool(cfg.theme_rate) {
                continue;
            }
            let theme = themes[g.rng.random_range(0..themes.len())];
            g.protos[p].theme = Some(theme);
            if g.rng.random_bool(cfg.theme_name_rate) {
                let word = capitalize(draw_word(&mut g.rng, &g.concepts[theme]));
                let name = &g.protos[p].name;
                g.protos[p].name = match name.split_once(' ') {
                    Some((_, rest)) => format!("{word} {rest}"),
                    None => format!("{word} {name}"),
                };
            }
        }
        for &(w, l) in &merge_pairs {
            if g.protos[w].concept == g.protos[l].concept {
                g.protos[l].theme = g.protos[w].theme;
            }
        }
    }

    // Neighbor pairs: siblings under one facet with different concepts and themes, not otherwise planted.
    let mut planted: HashSet<(usize, usize)> = HashSet::new();
    for &(w, l) in &merge_pairs {
        planted.insert((w.min(l), w.max(l)));
    }
    for members in &cluster_members {
        for &a in members {
            for &b in members {
                if a < b {
                    planted.insert((a, b));
                }
            }
        }
    }
    let mut options = Vec::new();
    for a in 0..g.protos.len() {
        for b in a + 1..g.protos.len() {
            let (pa, pb) = (&g.protos[a], &g.protos[b]);
            if pa.role.pairable()
                && pb.role.pairable()
                && pa.parent == pb.parent
                && pa.concept != pb.concept
                && (pa.theme.is_none() || pa.theme != pb.theme)
                && !planted.contains(&(a, b))
            {
                options.push((a, b));
            }
        }
    }
    if options.len() < cfg.neighbors {
        return Err(Error::InvalidConfig(format!(
            "only {} sibling pairs available for {} neighbor pairs",
            options.len(),
            cfg.neighbors
        )));
    }
    options.shuffle(&mut g.rng);
    options.truncate(cfg.neighbors);
    options.sort_unstable();

    let ids: Vec<TopicId> = (0..g.protos.len()).map(|i| TopicId::new(format!("t{:04}", i + 1))).collect();
    let questions = generate_questions(&mut g, &hubs, &ids)?;

    let mut events = Vec::new();
    for (p, proto) in g.protos.iter().enumerate() {
        if let Some(parent) = proto.parent {
            events.push(Event {
                kind: EventKind::ParentAdd,
                src: ids[p].clone(),
                dst: ids[parent].clone(),
                at: proto.created.max(g.protos[parent].created) + 3600,
            });
        }
    }
    for &(src, dst, at) in &merge_events {
        events.push(Event {
            kind: EventKind::Merge,
            src: ids[src].clone(),
            dst: ids[dst].clone(),
            at,
        });
    }
    for &(src, dst, at, back) in &unmerge_events {
        events.push(Event {
            kind: EventKind::Merge,
            src: ids[src].clone(),
            dst: ids[dst].clone(),
            at,
        });
        events.push(Event {
            kind: EventKind::Unmerge,
            src: ids[src].clone(),
            dst: ids[dst].clone(),
            at: back,
        });
    }

    let pair = |a: usize, b: usize| canonical_pair((&g.protos[a].name, &ids[a]), (&g.protos[b].name, &ids[b]));
    let mut truth = Vec::new();
    for &(w, l) in &merge_pairs {
        let (t1, t2) = pair(w, l);
        truth.push(TruthRecord {
            t1,
            t2,
            class: PairKind::Merge,
            winner: Some(ids[w].clone()),
        });
    }
    for &(a, b) in &options {
        let (t1, t2) = pair(a, b);
        truth.push(TruthRecord {
            t1,
            t2,
            class: PairKind::Neighbor,
            winner: None,
        });
    }
    for &(src, dst, _, _) in &unmerge_events {
        let (t1, t2) = pair(src, dst);
        truth.push(TruthRecord {
            t1,
            t2,
            class: PairKind::Unmerge,
            winner: None,
        });
    }

    let topics: Vec<Topic> = g
        .protos
        .iter()
        .enumerate()
        .map(|(i, p)| Topic {
            id: ids[i].clone(),
            name: p.name.clone(),
            created_at: p.created,
        })
        .collect();
    let corpus = Corpus::new(topics, questions, events)?;
    let embeddings = embeddings(&mut g);
    let taxonomy = taxonomy(&g);
    Ok(SynthOutput {
        corpus,
        truth,
        embeddings,
        taxonomy,
    })
}

fn draw_word<'c>(rng: &mut ChaCha8Rng, c: &'c Concept) -> &'c str {
    let z = Zipf::new(c.words.len() as f64, 1.0).expect("non-empty concept");
    let r = (z.sample(rng) as usize).clamp(1, c.words.len());
    &c.words[r - 1]
}

fn generate_questions(g: &mut Generator<'_>, hubs: &[usize], ids: &[TopicId]) -> Result<Vec<Question>> {
    let cfg = g.cfg;
    let popular: Vec<usize> = (0..g.protos.len()).filter(|&p| g.protos[p].role == Role::Popular).collect();
    let strays: Vec<usize> = (0..g.protos.len())
        .filter(|&p| matches!(g.protos[p].role, Role::Plain | Role::Decoy(_) | Role::Hub | Role::Facet))
        .collect();
    let background = g.protos[0].concept;
    let mut out = Vec::new();
    for p in 0..g.protos.len() {
        let proto = &g.protos[p];
        let category_concept = proto.category.map(|k| g.protos[hubs[k]].concept);
        let answers = if proto.answers > 0.0 {
            Some(Poisson::new(proto.answers).expect("positive mean"))
        } else {
            None
        };
        for &(from, to, n) in &proto.windows {
            for _ in 0..n {
                let at = uniform_ts(&mut g.rng, from, to);
                let len = g.rng.random_range(cfg.tokens_min..=cfg.tokens_max);
                let mut tokens: Vec<&str> = Vec::with_capacity(len);
                for _ in 0..len {
                    let r: f64 = g.rng.random();
                    let concept = if r < cfg.concept_word_rate {
                        match (proto.theme, proto.pool) {
                            (Some(t), _) if g.rng.random_bool(cfg.theme_share) => t,
                            (_, Some(pool)) if g.rng.random_bool(cfg.decoy_overlap) => pool,
                            _ => proto.concept,
                        }
                    } else if r < cfg.concept_word_rate + cfg.category_word_rate {
                        category_concept.unwrap_or(background)
                    } else {
                        background
                    };
                    tokens.push(draw_word(&mut g.rng, &g.concepts[concept]));
                }
                let text = format!("{}?", capitalize(&tokens.join(" ")));

                let mut tags: BTreeSet<usize> = BTreeSet::from([p]);
                if let Some(k) = proto.category {
                    if g.rng.random_bool(cfg.hub_tag_rate) {
                        tags.insert(hubs[k]);
                    }
                }
                for &f in &proto.facets {
                    if g.rng.random_bool(cfg.facet_tag_rate) {
                        tags.insert(f);
                    }
                }
                if !popular.is_empty() && g.rng.random_bool(cfg.popular_tag_rate) {
                    tags.insert(popular[g.rng.random_range(0..popular.len())]);
                }
                if !strays.is_empty() && g.rng.random_bool(cfg.stray_tag_rate) {
                    tags.insert(strays[g.rng.random_range(0..strays.len())]);
                }
                let answer_count = answers.as_ref().map(|a| a.sample(&mut g.rng) as u32);
                out.push(Question {
                    id: format!("q{:06}", out.len() + 1),
                    text,
                    created_at: at,
                    topic_ids: tags.into_iter().map(|t| ids[t].clone()).collect(),
                    answer_count,
                });
            }
        }
    }
    Ok(out)
}

fn embeddings(g: &mut Generator<'_>) -> Vec<(String, Vec<f64>)> {
    let dim = g.cfg.embedding_dim;
    let mut out = Vec::new();
    for (i, c) in g.concepts.iter().enumerate() {
        for w in &c.words {
            let noise = gaussian_vec(&mut g.rng, dim, if i == 0 { 1.0 } else { 0.6 });
            let v = if i == 0 {
                noise
            } else {
                c.centroid.iter().zip(&noise).map(|(a, b)| a + b).collect()
            };
            out.push((w.clone(), v));
        }
    }
    out
}

fn taxonomy(g: &Generator<'_>) -> Vec<(String, String)> {
    let mut edges = Vec::new();
    for k in 0..g.cfg.categories {
        edges.push((format!("domain_{k}.n.01"), TAXONOMY_ROOT.to_string()));
    }
    for j in 0..GENERAL_GROUPS {
        edges.push((format!("general_{j}.n.01"), TAXONOMY_ROOT.to_string()));
    }
    for k in 0..g.cfg.categories {
        for s in 0..SENSES_PER_DOMAIN {
            edges.push((format!("sense_{k}_{s}.n.01"), format!("domain_{k}.n.01")));
        }
    }
    let function: HashSet<&str> = FUNCTION_WORDS.iter().copied().collect();
    let mut seen = HashSet::new();
    for (i, c) in g.concepts.iter().enumerate() {
        for (j, w) in c.words.iter().enumerate() {
            if function.contains(w.as_str()) || !seen.insert(w.as_str()) {
                continue;
            }
            // Senses follow spelling, not concepts.
            let parent = match (i, c.category) {
                (0, _) | (_, None) => format!("general_{}.n.01", j % GENERAL_GROUPS),
                (_, Some(k)) => {
                    let s = w.bytes().map(usize::from).sum::<usize>() % SENSES_PER_DOMAIN;
                    format!("sense_{k}_{s}.n.01")
                }
            };
            edges.push((format!("{w}.n.01"), parent));
        }
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SynthConfig {
        SynthConfig {
            topics: 150,
            categories: 4,
            facets_per_category: 3,
            merges: 30,
            neighbors: 60,
            unmerges: 12,
            questions_mean: 15.0,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn infeasible_topic_budget() {
        let cfg = SynthConfig {
            topics: 100,
            ..SynthConfig::default()
        };
        assert!(matches!(generate_synthetic(&cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn rates_are_checked() {
        let cfg = SynthConfig {
            shared_vocab_rate: 1.5,
            ..small()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn counts_match_config() {
        let cfg = small();
        let out = generate_synthetic(&cfg).unwrap();
        assert_eq!(out.corpus.topic_count(), cfg.topics);
        let count = |k| out.truth.iter().filter(|r| r.class == k).count();
        assert_eq!(count(PairKind::Merge), cfg.merges);
        assert_eq!(count(PairKind::Neighbor), cfg.neighbors);
        assert_eq!(count(PairKind::Unmerge), cfg.unmerges);
    }
}
