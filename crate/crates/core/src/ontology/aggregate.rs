use std::collections::BTreeMap;

use super::ic::{similarity_idx, InformationContent, Measure};
use super::Ontology;
use crate::corpus::{SnapshotView, TopicId};
use crate::error::Result;
use crate::textfeat::{counts_overlap, OverlapMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AggregateStat {
    Path,
    AdamicAdar,
    Lin,
    Resnik,
    Jcn,
    Wup,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Which {
    Top,
    Bottom,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AggregateConfig {
    /// Number of co-occurring topics taken from each side.
    pub k: usize,
    /// Path value used when no cross pair is connected.
    pub max_path: f64,
}

impl Default for AggregateConfig {
    fn default() -> Self {
        AggregateConfig { k: 5, max_path: 20.0 }
    }
}

/// The `k` most (or least) frequent co-occurring topics, ties by id.
pub fn select_cooccurring(co: &BTreeMap<TopicId, usize>, k: usize, which: Which) -> Vec<TopicId> {
    let mut items: Vec<(&TopicId, usize)> = co.iter().map(|(t, &c)| (t, c)).collect();
    match which {
        Which::Top => items.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0))),
        Which::Bottom => items.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(b.0))),
    }
    items.into_iter().take(k).map(|(t, _)| t.clone()).collect()
}

/// Averages `stat` over the cross pairs of two topic lists.
///
/// Path terms for unreachable or absent nodes are skipped; if every term is
/// skipped (or a side is empty) the path result is `max_path`. Similarity
/// stats count absent nodes as 0 and return 0 for an empty side.
pub fn aggregate_over(
    o: &Ontology,
    ic: &InformationContent,
    a: &[TopicId],
    b: &[TopicId],
    stat: AggregateStat,
    max_path: f64,
) -> f64 {
    let nodes = |ts: &[TopicId]| ts.iter().map(|t| o.node(t.as_str())).collect::<Vec<_>>();
    let (na, nb) = (nodes(a), nodes(b));
    if stat == AggregateStat::Path {
        let mut sum = 0.0;
        let mut terms = 0usize;
        for x in na.iter().flatten() {
            for y in nb.iter().flatten() {
                if let Some(d) = o.path_len(*x, *y) {
                    sum += d as f64;
                    terms += 1;
                }
            }
        }
        return if terms == 0 { max_path } else { sum / terms as f64 };
    }
    if na.is_empty() || nb.is_empty() {
        return 0.0;
    }
    let mut sum = 0.0;
    for x in &na {
        for y in &nb {
            if let (Some(x), Some(y)) = (x, y) {
                sum += match stat {
                    AggregateStat::AdamicAdar => o.adamic_adar_idx(*x, *y),
                    AggregateStat::Lin => similarity_idx(o, ic, *x, *y, Measure::Lin),
                    AggregateStat::Resnik => similarity_idx(o, ic, *x, *y, Measure::Resnik),
                    AggregateStat::Jcn => similarity_idx(o, ic, *x, *y, Measure::Jcn),
                    AggregateStat::Wup => o.wup_idx(*x, *y),
                    AggregateStat::Path => unreachable!(),
                };
            }
        }
    }
    sum / (na.len() * nb.len()) as f64
}

/// Aggregate ontology statistic over the top/bottom-`k` co-occurring topics
/// of each side of `pair`.
#[allow(clippy::too_many_arguments)]
pub fn cooccur_aggregate(
    v: &SnapshotView<'_>,
    o: &Ontology,
    ic: &InformationContent,
    pair: (&TopicId, &TopicId),
    stat: AggregateStat,
    k: usize,
    which: Which,
    cfg: &AggregateConfig,
) -> Result<f64> {
    let a = select_cooccurring(&v.cooccurrence(pair.0)?, k, which);
    let b = select_cooccurring(&v.cooccurrence(pair.1)?, k, which);
    Ok(aggregate_over(o, ic, &a, &b, stat, cfg.max_path))
}

pub(crate) fn expand(o: &Ontology, co: &BTreeMap<TopicId, usize>) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for (t, &c) in co {
        *out.entry(t.0.clone()).or_insert(0) += c;
        if let Some(i) = o.node(t.as_str()) {
            for &r in o.parents(i).iter().chain(o.children(i)) {
                *out.entry(o.name(r).to_string()).or_insert(0) += c;
            }
        }
    }
    out
}

/// Overlap of two co-occurrence maps after adding every member's parents and
/// children, each carrying the member's count.
pub fn parent_child_overlap(
    o: &Ontology,
    co1: &BTreeMap<TopicId, usize>,
    co2: &BTreeMap<TopicId, usize>,
    mode: OverlapMode,
) -> f64 {
    counts_overlap(&expand(o, co1), &expand(o, co2), mode)
}

pub fn cooccur_parent_child_overlap(
    v: &SnapshotView<'_>,
    o: &Ontology,
    pair: (&TopicId, &TopicId),
    mode: OverlapMode,
) -> Result<f64> {
    Ok(parent_child_overlap(o, &v.cooccurrence(pair.0)?, &v.cooccurrence(pair.1)?, mode))
}
