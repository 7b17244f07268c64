use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{canonical_pair, CandidatePair, PairKind};
use crate::corpus::{SnapshotView, TopicId};
use crate::error::Result;
use crate::textfeat::{abbreviation_pair, jaro_winkler, set_overlap};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub min_questions: usize,
    /// Pairs whose lowercased names reach this Jaro-Winkler score are dropped.
    pub jw_threshold: f64,
    /// Minimum unweighted overlap of the two co-occurring topic sets.
    pub cooccur_threshold: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            min_questions: 20,
            jw_threshold: 0.8,
            cooccur_threshold: 0.25,
        }
    }
}

/// Name-based filters applied to every pair, labeled or not.
pub fn passes_name_filters(name1: &str, name2: &str, cfg: &FilterConfig) -> bool {
    jaro_winkler(&name1.to_lowercase(), &name2.to_lowercase()) < cfg.jw_threshold && !abbreviation_pair(name1, name2)
}

/// All unordered topic pairs of the view that pass, in turn, the minimum
/// question count, the name filters and the co-occurrence threshold. Output
/// is in canonical order.
pub fn generate_candidates(v: &SnapshotView<'_>, cfg: &FilterConfig) -> Result<Vec<CandidatePair>> {
    let mut eligible: Vec<(&str, &TopicId, BTreeSet<TopicId>)> = Vec::new();
    for t in v.base().topics() {
        if v.question_count(&t.id)? >= cfg.min_questions {
            let co: BTreeMap<TopicId, usize> = v.cooccurrence(&t.id)?;
            eligible.push((t.name.as_str(), &t.id, co.into_keys().collect()));
        }
    }
    let lower: Vec<String> = eligible.iter().map(|e| e.0.to_lowercase()).collect();
    let mut pairs: Vec<CandidatePair> = (0..eligible.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let eligible = &eligible;
            let lower = &lower;
            (i + 1..eligible.len()).filter_map(move |j| {
                let (a, b) = (&eligible[i], &eligible[j]);
                if jaro_winkler(&lower[i], &lower[j]) >= cfg.jw_threshold || abbreviation_pair(a.0, b.0) {
                    return None;
                }
                if set_overlap(&a.2, &b.2) < cfg.cooccur_threshold {
                    return None;
                }
                let (t1, t2) = canonical_pair((a.0, a.1), (b.0, b.1));
                Some(CandidatePair {
                    t1,
                    t2,
                    provenance: PairKind::Generated,
                })
            })
        })
        .collect();
    pairs.sort_by(|x, y| (&x.t1, &x.t2).cmp(&(&y.t1, &y.t2)));
    Ok(pairs)
}
