use std::collections::HashMap;

use super::{intersect_sorted, Ontology};
use crate::corpus::{SnapshotView, TopicId};

pub const JCN_EPSILON: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Measure {
    Lin,
    Resnik,
    Jcn,
    Wup,
}

/// Per-node information content `-ln p(c)`, where `p(c)` is the share of
/// question mass at `c` and all of its descendants.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InformationContent {
    values: Vec<f64>,
    total_mass: f64,
}

impl InformationContent {
    /// IC values indexed like the ontology's nodes.
    pub fn from_values(values: Vec<f64>, total_mass: f64) -> Self {
        InformationContent { values, total_mass }
    }

    /// Builds IC from per-node raw frequencies (before smoothing).
    pub fn from_frequencies(o: &Ontology, freq: impl Fn(usize) -> f64) -> Self {
        let n = o.len();
        let smoothed: Vec<f64> = (0..n).map(|i| freq(i) + 1.0).collect();
        // mass(c) sums each descendant once, whatever the number of paths.
        let mut mass = vec![0.0; n];
        let mut seen = vec![usize::MAX; n];
        for (c, m) in mass.iter_mut().enumerate() {
            let mut stack = vec![c];
            let mut acc = 0.0;
            while let Some(u) = stack.pop() {
                if seen[u] == c {
                    continue;
                }
                seen[u] = c;
                acc += smoothed[u];
                stack.extend(o.children(u).iter().copied());
            }
            *m = acc;
        }
        let total: f64 = (0..n).filter(|&i| o.parents(i).is_empty()).map(|i| mass[i]).sum();
        let values = mass
            .iter()
            .map(|&m| {
                let v = if total > 0.0 { -(m / total).ln() } else { 0.0 };
                if v > 0.0 {
                    v
                } else {
                    0.0
                }
            })
            .collect();
        InformationContent {
            values,
            total_mass: total,
        }
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values.get(i).copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }
}

/// Question counts in the view (plus one) propagated up the ontology.
pub fn information_content(o: &Ontology, v: &SnapshotView<'_>) -> InformationContent {
    let counts: HashMap<&str, usize> = (0..o.len())
        .filter_map(|i| {
            let id = TopicId::new(o.name(i));
            v.question_count(&id).ok().map(|c| (o.name(i), c))
        })
        .collect();
    InformationContent::from_frequencies(o, |i| counts.get(o.name(i)).copied().unwrap_or(0) as f64)
}

pub(crate) fn similarity_idx(o: &Ontology, ic: &InformationContent, a: usize, b: usize, measure: Measure) -> f64 {
    if measure == Measure::Wup {
        return o.wup_idx(a, b);
    }
    let lcs_ic = intersect_sorted(o.ancestors_or_self(a), o.ancestors_or_self(b))
        .map(|c| ic.get(c))
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |m| m.max(x))));
    let Some(lcs_ic) = lcs_ic else {
        return 0.0;
    };
    let (ia, ib) = (ic.get(a), ic.get(b));
    match measure {
        Measure::Resnik => lcs_ic,
        Measure::Lin => {
            if ia + ib > 0.0 {
                (2.0 * lcs_ic / (ia + ib)).clamp(0.0, 1.0)
            } else {
                0.0
            }
        }
        Measure::Jcn => 1.0 / (ia + ib - 2.0 * lcs_ic).max(JCN_EPSILON),
        Measure::Wup => unreachable!(),
    }
}

/// Taxonomy similarity between two named nodes; 0 when either is absent or
/// they share no subsumer.
pub fn taxo_similarity(o: &Ontology, ic: &InformationContent, a: &str, b: &str, measure: Measure) -> f64 {
    match (o.node(a), o.node(b)) {
        (Some(a), Some(b)) => similarity_idx(o, ic, a, b, measure),
        _ => 0.0,
    }
}
