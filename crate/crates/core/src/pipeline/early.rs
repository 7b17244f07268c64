use chrono::{DateTime, Months};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::features::{FeatureContext, Resources};
use super::index::CorpusIndex;
use super::two_step::TwoStepModel;
use crate::corpus::{Corpus, Event, Timestamp};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EarlyPoint {
    pub month: u32,
    pub detected: usize,
    pub total: usize,
    pub recall: f64,
}

/// `ts` moved forward by `months` calendar months (day clamped to month end).
pub fn add_months(ts: Timestamp, months: u32) -> Result<Timestamp> {
    DateTime::from_timestamp(ts, 0)
        .and_then(|d| d.checked_add_months(Months::new(months)))
        .map(|d| d.timestamp())
        .ok_or_else(|| Error::InvalidConfig(format!("timestamp {ts} + {months} months out of range")))
}

/// Month index at which each merge was first predicted positive, if ever.
/// Snapshots run every `month_step` months from the later topic's creation;
/// the last one is clamped to one second before the merge.
fn first_detection(
    m: &TwoStepModel,
    c: &Corpus,
    index: &CorpusIndex,
    res: &Resources,
    e: &Event,
    month_step: u32,
) -> Result<(Option<u32>, u32)> {
    let later = [&e.src, &e.dst]
        .into_iter()
        .map(|t| c.topic(t).ok_or_else(|| Error::UnknownTopic(t.0.clone())))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max_by(|a, b| (a.created_at, &a.id).cmp(&(b.created_at, &b.id)))
        .expect("two topics");
    let mut k = 0u32;
    loop {
        k += 1;
        let t = add_months(later.created_at, k * month_step)?;
        let last = t >= e.at - 1;
        let cutoff = t.min(e.at - 1);
        let ctx = FeatureContext::new(c.snapshot(cutoff), index, res)?;
        let row = ctx.featurize(&e.src, &e.dst)?;
        if m.predict(&row)?.label {
            return Ok((Some(k), k));
        }
        if last {
            return Ok((None, k));
        }
    }
}

/// Cumulative recall by snapshot month over the given merges.
pub fn early_eval(
    m: &TwoStepModel,
    c: &Corpus,
    index: &CorpusIndex,
    res: &Resources,
    test_merges: &[Event],
    month_step: u32,
) -> Result<Vec<EarlyPoint>> {
    if month_step == 0 {
        return Err(Error::InvalidConfig("month step must be positive".into()));
    }
    if test_merges.is_empty() {
        return Ok(Vec::new());
    }
    let found: Vec<(Option<u32>, u32)> = test_merges
        .par_iter()
        .map(|e| first_detection(m, c, index, res, e, month_step))
        .collect::<Result<_>>()?;
    let horizon = found.iter().map(|f| f.1).max().unwrap_or(0);
    let total = test_merges.len();
    Ok((1..=horizon)
        .map(|k| {
            let detected = found.iter().filter(|f| f.0.is_some_and(|d| d <= k)).count();
            EarlyPoint {
                month: k * month_step,
                detected,
                total,
                recall: detected as f64 / total as f64,
            }
        })
        .collect())
}
