use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::candidates::{generate_candidates, passes_name_filters, FilterConfig};
use super::features::{FeatureContext, Resources};
use super::index::CorpusIndex;
use super::two_step::PairRow;
use super::{canonical_ids, PairKind};
use crate::corpus::{chrono_split, read_jsonl, write_jsonl, Corpus, Event, EventKind, Timestamp, TopicId};
use crate::error::{Error, Result};
use crate::models::derive_seed;
use crate::ontology::build_ontology;

/// One line of `ground_truth.jsonl`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthRecord {
    pub t1: TopicId,
    pub t2: TopicId,
    pub class: PairKind,
    /// Surviving topic of a merge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub winner: Option<TopicId>,
}

pub fn load_truth(path: &Path) -> Result<Vec<TruthRecord>> {
    Ok(read_jsonl(path)?.into_iter().map(|(_, r)| r).collect())
}

pub fn write_truth(path: &Path, records: &[TruthRecord]) -> Result<()> {
    write_jsonl(path, records.iter())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub filter: FilterConfig,
    pub train_fraction: f64,
    /// Candidate pairs sampled as negative test instances.
    pub test_negatives: usize,
    /// Further candidate pairs reserved for fitting the anomaly filter.
    pub anomaly_train_size: usize,
    /// Cap on derived neighbor pairs per merge when no ground truth is given.
    pub neighbors_per_merge: usize,
    pub seed: u64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            filter: FilterConfig::default(),
            train_fraction: 0.7,
            test_negatives: 1_000_000,
            anomaly_train_size: 200_000,
            neighbors_per_merge: 4,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
    Anomaly,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
            Split::Anomaly => "anomaly",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Split::Train, Split::Test, Split::Anomaly].into_iter().find(|x| x.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub t1: TopicId,
    pub t2: TopicId,
    pub kind: PairKind,
    pub split: Split,
    pub label: bool,
    /// Event time for labeled pairs; the corpus end for sampled candidates.
    pub at: Timestamp,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dataset {
    pub pairs: Vec<LabeledPair>,
    /// Merge events that were not reverted, split chronologically.
    pub train_merges: Vec<Event>,
    pub test_merges: Vec<Event>,
}

impl Dataset {
    pub fn split(&self, s: Split) -> impl Iterator<Item = &LabeledPair> {
        self.pairs.iter().filter(move |p| p.split == s)
    }
}

type Key = (TopicId, TopicId);

fn unordered(a: &TopicId, b: &TopicId) -> Key {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

fn names_ok(c: &Corpus, a: &TopicId, b: &TopicId, cfg: &FilterConfig) -> Result<bool> {
    let name = |t: &TopicId| c.topic(t).map(|x| x.name.as_str()).ok_or_else(|| Error::UnknownTopic(t.0.clone()));
    Ok(passes_name_filters(name(a)?, name(b)?, cfg))
}

/// Merge events not followed by an unmerge of the same pair.
pub(crate) fn lasting_merges(c: &Corpus) -> Vec<Event> {
    let events = c.events();
    events
        .iter()
        .enumerate()
        .filter(|(_, e)| e.kind == EventKind::Merge)
        .filter(|(i, e)| {
            let key = unordered(&e.src, &e.dst);
            !events[i + 1..]
                .iter()
                .any(|u| u.kind == EventKind::Unmerge && unordered(&u.src, &u.dst) == key)
        })
        .map(|(_, e)| e.clone())
        .collect()
}

/// Assembles labeled training pairs, chronologically split positives,
/// sampled negative test pairs and the anomaly-training pool.
///
/// Neighbor pairs come from `truth` when given. Otherwise each merge
/// contributes up to `neighbors_per_merge` pairs joining one merge topic to
/// an ontology neighbor or sibling of either merge topic.
pub fn build_dataset(c: &Corpus, truth: Option<&[TruthRecord]>, cfg: &DatasetConfig) -> Result<Dataset> {
    let end = c.time_range().map_or(0, |r| r.1);
    let mut pairs = Vec::new();
    let mut labeled: HashSet<Key> = HashSet::new();

    for e in c.events() {
        if matches!(e.kind, EventKind::Merge | EventKind::Unmerge) {
            labeled.insert(unordered(&e.src, &e.dst));
        }
    }

    let mut merges = Vec::new();
    for e in lasting_merges(c) {
        if names_ok(c, &e.src, &e.dst, &cfg.filter)? {
            merges.push(e);
        }
    }
    if merges.is_empty() {
        return Err(Error::EmptyInput("no merge events survive the filters"));
    }
    let (train_merges, test_merges) = chrono_split(&merges, cfg.train_fraction)?;
    let push = |pairs: &mut Vec<LabeledPair>, a: &TopicId, b: &TopicId, kind, split, label, at| -> Result<()> {
        let (t1, t2) = canonical_ids(c, a, b)?;
        pairs.push(LabeledPair {
            t1,
            t2,
            kind,
            split,
            label,
            at,
        });
        Ok(())
    };
    for e in &train_merges {
        push(&mut pairs, &e.src, &e.dst, PairKind::Merge, Split::Train, true, e.at)?;
    }

    let mut seen_unmerge = HashSet::new();
    for e in c.events_of_kind(EventKind::Unmerge) {
        let key = unordered(&e.src, &e.dst);
        if names_ok(c, &e.src, &e.dst, &cfg.filter)? && seen_unmerge.insert(key) {
            push(&mut pairs, &e.src, &e.dst, PairKind::Unmerge, Split::Train, false, e.at)?;
        }
    }

    let mut neighbor_keys: BTreeSet<Key> = BTreeSet::new();
    match truth {
        Some(records) => {
            for r in records.iter().filter(|r| r.class == PairKind::Neighbor) {
                let key = unordered(&r.t1, &r.t2);
                if !labeled.contains(&key) && names_ok(c, &r.t1, &r.t2, &cfg.filter)? && neighbor_keys.insert(key) {
                    push(&mut pairs, &r.t1, &r.t2, PairKind::Neighbor, Split::Train, false, end)?;
                }
            }
        }
        None => {
            let onto = build_ontology(c.events())?;
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 11));
            for e in &merges {
                let mut options: BTreeSet<Key> = BTreeSet::new();
                for (x, partner) in [(&e.src, &e.dst), (&e.dst, &e.src)] {
                    let Some(i) = onto.node(x.as_str()) else { continue };
                    let mut near: BTreeSet<usize> = onto.neighbors(i).iter().copied().collect();
                    for &p in onto.parents(i) {
                        near.extend(onto.children(p).iter().copied());
                    }
                    for y in near {
                        let y = TopicId::new(onto.name(y));
                        if &y == x || &y == partner || c.topic(&y).is_none() {
                            continue;
                        }
                        let key = unordered(x, &y);
                        if !labeled.contains(&key) && !neighbor_keys.contains(&key) {
                            options.insert(key);
                        }
                    }
                }
                let mut options: Vec<Key> = options.into_iter().collect();
                options.shuffle(&mut rng);
                let mut taken = 0;
                for (a, b) in options {
                    if taken == cfg.neighbors_per_merge {
                        break;
                    }
                    if names_ok(c, &a, &b, &cfg.filter)? {
                        neighbor_keys.insert((a.clone(), b.clone()));
                        push(&mut pairs, &a, &b, PairKind::Neighbor, Split::Train, false, e.at)?;
                        taken += 1;
                    }
                }
            }
        }
    }
    labeled.extend(neighbor_keys);

    for e in &test_merges {
        push(&mut pairs, &e.src, &e.dst, PairKind::Merge, Split::Test, true, e.at)?;
    }

    let mut pool: Vec<Key> = generate_candidates(&c.full_view(), &cfg.filter)?
        .into_iter()
        .filter(|p| !labeled.contains(&unordered(&p.t1, &p.t2)))
        .map(|p| (p.t1, p.t2))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 7));
    pool.shuffle(&mut rng);
    let n_test = cfg.test_negatives.min(pool.len());
    let n_anomaly = cfg.anomaly_train_size.min(pool.len() - n_test);
    for (i, (t1, t2)) in pool.into_iter().take(n_test + n_anomaly).enumerate() {
        let split = if i < n_test { Split::Test } else { Split::Anomaly };
        pairs.push(LabeledPair {
            t1,
            t2,
            kind: PairKind::Generated,
            split,
            label: false,
            at: end,
        });
    }

    Ok(Dataset {
        pairs,
        train_merges,
        test_merges,
    })
}

/// Labeled pairs with their catalog features, all computed on one snapshot.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FeaturizedDataset {
    pub pairs: Vec<LabeledPair>,
    pub rows: Vec<Vec<f64>>,
}

impl FeaturizedDataset {
    pub fn rows_where(&self, split: Split, label: Option<bool>) -> Vec<PairRow> {
        self.pairs
            .iter()
            .zip(&self.rows)
            .filter(|(p, _)| p.split == split && label.is_none_or(|l| p.label == l))
            .map(|(p, r)| PairRow {
                t1: p.t1.clone(),
                t2: p.t2.clone(),
                features: r.clone(),
            })
            .collect()
    }

    pub fn labels(&self, split: Split) -> Vec<bool> {
        self.pairs.iter().filter(|p| p.split == split).map(|p| p.label).collect()
    }
}

/// Featurizes every pair of `ds` on the snapshot ending at `cutoff`.
pub fn featurize_dataset(
    c: &Corpus,
    index: &CorpusIndex,
    res: &Resources,
    ds: &Dataset,
    cutoff: Timestamp,
) -> Result<FeaturizedDataset> {
    let ctx = FeatureContext::new(c.snapshot(cutoff), index, res)?;
    let keys: Vec<(TopicId, TopicId)> = ds.pairs.iter().map(|p| (p.t1.clone(), p.t2.clone())).collect();
    Ok(FeaturizedDataset {
        pairs: ds.pairs.clone(),
        rows: ctx.featurize_all(&keys)?,
    })
}
