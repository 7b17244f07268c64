//! The pair feature catalog and its snapshot-bound evaluator.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::index::CorpusIndex;
use crate::corpus::{SnapshotView, TopicId};
use crate::embed::{VectorTable, DEFAULT_MIN_COUNT};
use crate::error::{Error, Result};
use crate::ontology::{
    aggregate::expand, aggregate_over, build_ontology, information_content, select_cooccurring, AggregateConfig,
    AggregateStat, InformationContent, Ontology, Which,
};
use crate::textfeat::{counts_overlap, OverlapMode, PosTagger, PosVector, RuleTagger};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureGroup {
    QuestionContent,
    Ontology,
    External,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 3] = [FeatureGroup::QuestionContent, FeatureGroup::Ontology, FeatureGroup::External];

    pub fn name(self) -> &'static str {
        match self {
            FeatureGroup::QuestionContent => "question_content",
            FeatureGroup::Ontology => "ontology",
            FeatureGroup::External => "external",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FeatureSpec {
    pub name: &'static str,
    pub group: FeatureGroup,
}

const fn qc(name: &'static str) -> FeatureSpec {
    FeatureSpec {
        name,
        group: FeatureGroup::QuestionContent,
    }
}

const fn on(name: &'static str) -> FeatureSpec {
    FeatureSpec {
        name,
        group: FeatureGroup::Ontology,
    }
}

pub const FEATURE_COUNT: usize = 36;

pub const CATALOG: [FeatureSpec; FEATURE_COUNT] = [
    qc("question_1gram_overlap_unweighted"),
    qc("question_1gram_overlap_weighted"),
    qc("question_2gram_overlap_unweighted"),
    qc("question_2gram_overlap_weighted"),
    qc("question_3gram_overlap_unweighted"),
    qc("question_3gram_overlap_weighted"),
    qc("question_4gram_overlap_unweighted"),
    qc("question_4gram_overlap_weighted"),
    qc("name_in_text_1gram_unweighted"),
    qc("name_in_text_1gram_weighted"),
    qc("name_in_text_2gram_unweighted"),
    qc("name_in_text_2gram_weighted"),
    qc("name_in_text_3gram_unweighted"),
    qc("name_in_text_3gram_weighted"),
    qc("name_in_text_4gram_unweighted"),
    qc("name_in_text_4gram_weighted"),
    qc("tfidf_cosine"),
    qc("cooccurring_topic_overlap_unweighted"),
    qc("cooccurring_topic_overlap_weighted"),
    qc("embedding_average_cosine"),
    qc("embedding_tfidf_cosine"),
    qc("pos_cosine"),
    qc("question_words_top20_overlap"),
    qc("question_words_bottom20_overlap"),
    on("cooccurring_parent_child_overlap_unweighted"),
    on("cooccurring_parent_child_overlap_weighted"),
    on("top5_average_min_path"),
    on("bottom5_average_min_path"),
    on("top5_adamic_adar"),
    on("bottom5_adamic_adar"),
    on("top5_lin"),
    on("top5_resnik"),
    on("top5_jcn"),
    on("top5_wup"),
    on("bottom5_lin"),
    FeatureSpec {
        name: "taxonomy_word_wup",
        group: FeatureGroup::External,
    },
];

pub fn feature_names() -> Vec<&'static str> {
    CATALOG.iter().map(|f| f.name).collect()
}

/// Catalog columns belonging to any of `groups`, in catalog order.
pub fn group_columns(groups: &[FeatureGroup]) -> Vec<usize> {
    (0..FEATURE_COUNT).filter(|&i| groups.contains(&CATALOG[i].group)).collect()
}

/// Optional inputs shared by every snapshot.
pub struct Resources {
    pub embeddings: Option<VectorTable>,
    pub taxonomy: Option<Ontology>,
    pub tagger: Box<dyn PosTagger>,
    pub min_count: usize,
    pub aggregate: AggregateConfig,
    /// Terms per topic used for the taxonomy feature.
    pub taxonomy_terms: usize,
}

impl Default for Resources {
    fn default() -> Self {
        Resources {
            embeddings: None,
            taxonomy: None,
            tagger: Box::new(RuleTagger),
            min_count: DEFAULT_MIN_COUNT,
            aggregate: AggregateConfig::default(),
            taxonomy_terms: 10,
        }
    }
}

type Gram = [u32; 4];
const PAD: u32 = u32::MAX;

/// Sorted n-gram counts with their total.
#[derive(Clone, Debug, Default)]
struct Grams {
    counts: Vec<(Gram, u64)>,
    total: u64,
}

impl Grams {
    fn build<'a>(seqs: impl Iterator<Item = &'a [u32]>, n: usize) -> Self {
        let mut all: Vec<Gram> = Vec::new();
        for s in seqs {
            for w in s.windows(n) {
                let mut g = [PAD; 4];
                g[..n].copy_from_slice(w);
                all.push(g);
            }
        }
        all.sort_unstable();
        let total = all.len() as u64;
        let mut counts: Vec<(Gram, u64)> = Vec::new();
        for g in all {
            match counts.last_mut() {
                Some((last, c)) if *last == g => *c += 1,
                _ => counts.push((g, 1)),
            }
        }
        Grams { counts, total }
    }

    fn overlap(&self, other: &Grams, mode: OverlapMode) -> f64 {
        if self.total == 0 || other.total == 0 {
            return 0.0;
        }
        let (a, b) = (&self.counts, &other.counts);
        let (mut i, mut j) = (0, 0);
        let (mut distinct, mut weighted) = (0u64, 0u64);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    distinct += 1;
                    weighted += a[i].1.min(b[j].1);
                    i += 1;
                    j += 1;
                }
            }
        }
        match mode {
            OverlapMode::Unweighted => distinct as f64 / a.len().min(b.len()) as f64,
            OverlapMode::Weighted => weighted as f64 / self.total.min(other.total) as f64,
        }
    }
}

/// Per-topic statistics at one snapshot.
struct Profile {
    grams: [Grams; 4],
    name_grams: [Grams; 4],
    tfidf: Vec<(u32, f64)>,
    tfidf_norm: f64,
    co: BTreeMap<TopicId, usize>,
    co_top: Vec<TopicId>,
    co_bottom: Vec<TopicId>,
    expanded: BTreeMap<String, usize>,
    avg_vec: Vec<f64>,
    tfidf_vec: Vec<f64>,
    pos: PosVector,
    top20: Vec<u32>,
    bottom20: Vec<u32>,
    top_terms: Vec<u32>,
}

/// Feature evaluator bound to one snapshot. Topic statistics are computed
/// on first use and cached; evaluation is safe from many threads.
pub struct FeatureContext<'a> {
    view: SnapshotView<'a>,
    index: &'a CorpusIndex,
    res: &'a Resources,
    ontology: Ontology,
    ic: InformationContent,
    profiles: Vec<OnceLock<Profile>>,
}

fn sorted_merge_count(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn dense_cosine(u: &[f64], w: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(w).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nw = w.iter().map(|b| b * b).sum::<f64>().sqrt();
    if nu == 0.0 || nw == 0.0 {
        0.0
    } else {
        (dot / (nu * nw)).clamp(-1.0, 1.0)
    }
}

impl<'a> FeatureContext<'a> {
    pub fn new(view: SnapshotView<'a>, index: &'a CorpusIndex, res: &'a Resources) -> Result<Self> {
        let ontology = build_ontology(view.events())?;
        let ic = information_content(&ontology, &view);
        Ok(FeatureContext {
            view,
            index,
            res,
            ontology,
            ic,
            profiles: (0..index.topic_count()).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn view(&self) -> &SnapshotView<'a> {
        &self.view
    }

    pub fn ontology(&self) -> &Ontology {
        &self.ontology
    }

    pub fn information_content(&self) -> &InformationContent {
        &self.ic
    }

    fn topic(&self, t: &TopicId) -> Result<usize> {
        self.index.topic_index(t).ok_or_else(|| Error::UnknownTopic(t.0.clone()))
    }

    fn profile(&self, i: usize) -> &Profile {
        self.profiles[i].get_or_init(|| self.build_profile(i))
    }

    fn build_profile(&self, i: usize) -> Profile {
        let idx = self.index;
        let cutoff = self.view.cutoff();
        let t = idx.topic_id(i);
        let qs = self.view.question_indices(t).unwrap_or(&[]);
        let grams: [Grams; 4] = std::array::from_fn(|k| Grams::build(qs.iter().map(|&q| idx.question_tokens(q)), k + 1));
        let name = idx.name_tokens(i);
        let name_grams: [Grams; 4] = std::array::from_fn(|k| Grams::build(std::iter::once(name), k + 1));

        let unigrams: Vec<(u32, u64)> = grams[0].counts.iter().map(|(g, c)| (g[0], *c)).collect();
        let tfidf: Vec<(u32, f64)> = unigrams
            .iter()
            .map(|&(w, c)| (w, c as f64 * idx.idf(w, cutoff)))
            .collect();
        let tfidf_norm = tfidf.iter().map(|(_, x)| x * x).sum::<f64>().sqrt();

        let co = self.view.cooccurrence(t).unwrap_or_default();
        let k = self.res.aggregate.k;
        let co_top = select_cooccurring(&co, k, Which::Top);
        let co_bottom = select_cooccurring(&co, k, Which::Bottom);
        let expanded = expand(&self.ontology, &co);

        let (avg_vec, tfidf_vec) = match &self.res.embeddings {
            Some(tab) => {
                let mut by_word: Vec<(&str, u64, f64)> = unigrams
                    .iter()
                    .zip(&tfidf)
                    .map(|(&(w, c), &(_, x))| (idx.word(w), c, x))
                    .filter(|&(w, _, _)| idx.word_id(w).is_some_and(|id| idx.corpus_count(id, cutoff) >= self.res.min_count))
                    .collect();
                by_word.sort_by(|a, b| a.0.cmp(b.0));
                let mut avg = vec![0.0; tab.dim()];
                let mut weighted = vec![0.0; tab.dim()];
                let (mut wa, mut wt) = (0.0, 0.0);
                for (w, c, x) in by_word {
                    let Some(v) = tab.get(w) else { continue };
                    for ((a, b), e) in avg.iter_mut().zip(weighted.iter_mut()).zip(v) {
                        *a += c as f64 * e;
                        *b += x * e;
                    }
                    wa += c as f64;
                    wt += x;
                }
                if wa > 0.0 {
                    avg.iter_mut().for_each(|a| *a /= wa);
                }
                if wt > 0.0 {
                    weighted.iter_mut().for_each(|b| *b /= wt);
                }
                (avg, weighted)
            }
            None => (Vec::new(), Vec::new()),
        };

        let mut pos = [0u64; 12];
        for &q in qs {
            for (p, c) in pos.iter_mut().zip(idx.question_pos(q)) {
                *p += c;
            }
        }

        let band = |desc: bool| -> Vec<u32> {
            let mut ws: Vec<(u32, u64)> = unigrams.clone();
            ws.sort_by(|a, b| {
                let by_count = if desc { b.1.cmp(&a.1) } else { a.1.cmp(&b.1) };
                by_count.then_with(|| idx.word(a.0).cmp(idx.word(b.0)))
            });
            let keep = ws.len().div_ceil(5);
            let mut out: Vec<u32> = ws.into_iter().take(keep).map(|(w, _)| w).collect();
            out.sort_unstable();
            out
        };

        let mut ranked: Vec<(u32, f64)> = tfidf.clone();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| idx.word(a.0).cmp(idx.word(b.0))));
        let top_terms = ranked.into_iter().take(self.res.taxonomy_terms).map(|(w, _)| w).collect();

        Profile {
            grams,
            name_grams,
            tfidf,
            tfidf_norm,
            co,
            co_top,
            co_bottom,
            expanded,
            avg_vec,
            tfidf_vec,
            pos: PosVector::from_counts(pos),
            top20: band(true),
            bottom20: band(false),
            top_terms,
        }
    }

    fn tfidf_cosine(a: &Profile, b: &Profile) -> f64 {
        if a.tfidf_norm == 0.0 || b.tfidf_norm == 0.0 {
            return 0.0;
        }
        let (x, y) = (&a.tfidf, &b.tfidf);
        let (mut i, mut j, mut dot) = (0, 0, 0.0);
        while i < x.len() && j < y.len() {
            match x[i].0.cmp(&y[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    dot += x[i].1 * y[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        (dot / (a.tfidf_norm * b.tfidf_norm)).clamp(-1.0, 1.0)
    }

    fn band_overlap(a: &[u32], b: &[u32]) -> f64 {
        if a.is_empty() || b.is_empty() {
            return 0.0;
        }
        sorted_merge_count(a, b) as f64 / a.len().min(b.len()) as f64
    }

    fn taxonomy_wup(&self, a: &Profile, b: &Profile) -> f64 {
        let Some(tax) = &self.res.taxonomy else {
            return 0.0;
        };
        let (mut sum, mut n) = (0.0, 0usize);
        for &x in &a.top_terms {
            for &y in &b.top_terms {
                if let Some(s) = tax.word_wup(self.index.word(x), self.index.word(y)) {
                    sum += s;
                    n += 1;
                }
            }
        }
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }

    /// The full catalog for one topic pair. Symmetric in its arguments.
    pub fn featurize(&self, t1: &TopicId, t2: &TopicId) -> Result<Vec<f64>> {
        let (i, j) = (self.topic(t1)?, self.topic(t2)?);
        let (a, b) = (self.profile(i), self.profile(j));
        let modes = [OverlapMode::Unweighted, OverlapMode::Weighted];
        let mut f = Vec::with_capacity(FEATURE_COUNT);
        for n in 0..4 {
            for mode in modes {
                f.push(a.grams[n].overlap(&b.grams[n], mode));
            }
        }
        for n in 0..4 {
            for mode in modes {
                let ab = a.name_grams[n].overlap(&b.grams[n], mode);
                let ba = b.name_grams[n].overlap(&a.grams[n], mode);
                f.push(ab.max(ba));
            }
        }
        f.push(Self::tfidf_cosine(a, b));
        for mode in modes {
            f.push(counts_overlap(&a.co, &b.co, mode));
        }
        f.push(dense_cosine(&a.avg_vec, &b.avg_vec));
        f.push(dense_cosine(&a.tfidf_vec, &b.tfidf_vec));
        f.push(a.pos.cosine(&b.pos));
        f.push(Self::band_overlap(&a.top20, &b.top20));
        f.push(Self::band_overlap(&a.bottom20, &b.bottom20));

        for mode in modes {
            f.push(counts_overlap(&a.expanded, &b.expanded, mode));
        }
        let (o, ic, max_path) = (&self.ontology, &self.ic, self.res.aggregate.max_path);
        let agg = |x: &[TopicId], y: &[TopicId], stat| aggregate_over(o, ic, x, y, stat, max_path);
        f.push(agg(&a.co_top, &b.co_top, AggregateStat::Path));
        f.push(agg(&a.co_bottom, &b.co_bottom, AggregateStat::Path));
        f.push(agg(&a.co_top, &b.co_top, AggregateStat::AdamicAdar));
        f.push(agg(&a.co_bottom, &b.co_bottom, AggregateStat::AdamicAdar));
        f.push(agg(&a.co_top, &b.co_top, AggregateStat::Lin));
        f.push(agg(&a.co_top, &b.co_top, AggregateStat::Resnik));
        f.push(agg(&a.co_top, &b.co_top, AggregateStat::Jcn));
        f.push(agg(&a.co_top, &b.co_top, AggregateStat::Wup));
        f.push(agg(&a.co_bottom, &b.co_bottom, AggregateStat::Lin));

        f.push(self.taxonomy_wup(a, b));
        debug_assert_eq!(f.len(), FEATURE_COUNT);
        Ok(f)
    }

    /// Features for many pairs, computed in parallel, in input order.
    pub fn featurize_all(&self, pairs: &[(TopicId, TopicId)]) -> Result<Vec<Vec<f64>>> {
        pairs.par_iter().map(|(a, b)| self.featurize(a, b)).collect()
    }
}

/// One-off featurization of a single pair at a snapshot.
pub fn featurize_pair(
    view: SnapshotView<'_>,
    index: &CorpusIndex,
    res: &Resources,
    pair: (&TopicId, &TopicId),
) -> Result<Vec<f64>> {
    FeatureContext::new(view, index, res)?.featurize(pair.0, pair.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_groups_cover_every_column_once() {
        let mut all: Vec<usize> = FeatureGroup::ALL.iter().flat_map(|&g| group_columns(&[g])).collect();
        all.sort_unstable();
        assert_eq!(all, (0..FEATURE_COUNT).collect::<Vec<_>>());
        let mut names = feature_names();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), FEATURE_COUNT);
    }

    #[test]
    fn grams_overlap_matches_definition() {
        let a = Grams::build([&[1u32, 2, 1][..]].into_iter(), 1);
        let b = Grams::build([&[1u32, 3, 3][..]].into_iter(), 1);
        assert_eq!(a.overlap(&b, OverlapMode::Unweighted), 0.5);
        assert!((a.overlap(&b, OverlapMode::Weighted) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(Grams::default().overlap(&a, OverlapMode::Weighted), 0.0);
    }
}
