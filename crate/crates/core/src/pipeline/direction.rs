use serde::{Deserialize, Serialize};

use super::canonical_ids;
use super::dataset::lasting_merges;
use crate::corpus::{Corpus, Event, EventKind, SnapshotView, TopicId};
use crate::error::{Error, Result};
use crate::models::{prf, stratified_folds, LinearKind, LinearModel, LinearParams, Prf};
use crate::textfeat::tokenize;

const SECONDS_PER_DAY: f64 = 86_400.0;

/// Model inputs, each a side-1 minus side-2 difference except the last,
/// which is +1 when side 1 is strictly older, -1 when side 2 is, else 0.
pub const DIRECTION_FEATURES: [&str; 6] = [
    "name_chars_diff",
    "name_words_diff",
    "created_days_diff",
    "questions_diff",
    "answers_diff",
    "older_indicator",
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionFeatures {
    pub values: [f64; 6],
    /// Whether any question of either topic carried an answer count.
    pub answers_available: bool,
}

impl DirectionFeatures {
    pub fn swapped(&self) -> Self {
        DirectionFeatures {
            values: self.values.map(|v| -v),
            answers_available: self.answers_available,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionSample {
    pub t1: TopicId,
    pub t2: TopicId,
    pub features: DirectionFeatures,
    /// True when `t1` is the surviving topic.
    pub label: bool,
}

struct SideStats {
    chars: f64,
    words: f64,
    created: f64,
    questions: f64,
    answers: f64,
    answers_seen: bool,
}

fn side_stats(v: &SnapshotView<'_>, t: &TopicId) -> Result<SideStats> {
    let topic = v.topic(t)?;
    let mut questions = 0usize;
    let mut answers = 0u64;
    let mut answers_seen = false;
    for q in v.questions_of(t)? {
        questions += 1;
        if let Some(a) = q.answer_count {
            answers += u64::from(a);
            answers_seen = true;
        }
    }
    Ok(SideStats {
        chars: topic.name.chars().count() as f64,
        words: tokenize(&topic.name).len() as f64,
        created: topic.created_at as f64 / SECONDS_PER_DAY,
        questions: questions as f64,
        answers: answers as f64,
        answers_seen,
    })
}

/// Features for an explicit side order, on the snapshot just before `at`.
pub fn direction_featurize_ordered(c: &Corpus, side1: &TopicId, side2: &TopicId, at: i64) -> Result<DirectionFeatures> {
    let v = c.snapshot(at - 1);
    let (a, b) = (side_stats(&v, side1)?, side_stats(&v, side2)?);
    let available = a.answers_seen || b.answers_seen;
    let older = match a.created.partial_cmp(&b.created) {
        Some(std::cmp::Ordering::Less) => 1.0,
        Some(std::cmp::Ordering::Greater) => -1.0,
        _ => 0.0,
    };
    Ok(DirectionFeatures {
        values: [
            a.chars - b.chars,
            a.words - b.words,
            a.created - b.created,
            a.questions - b.questions,
            if available { a.answers - b.answers } else { 0.0 },
            older,
        ],
        answers_available: available,
    })
}

/// Canonically ordered features and label for one merge event.
pub fn direction_featurize(c: &Corpus, merge: &Event) -> Result<DirectionSample> {
    if merge.kind != EventKind::Merge {
        return Err(Error::InvalidConfig(format!("{:?} event is not a merge", merge.kind)));
    }
    let (t1, t2) = canonical_ids(c, &merge.src, &merge.dst)?;
    let features = direction_featurize_ordered(c, &t1, &t2, merge.at)?;
    let label = t1 == merge.dst;
    Ok(DirectionSample {
        t1,
        t2,
        features,
        label,
    })
}

/// Samples for every merge that was not later reverted.
pub fn direction_samples(c: &Corpus) -> Result<Vec<DirectionSample>> {
    lasting_merges(c).iter().map(|e| direction_featurize(c, e)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Side1,
    Side2,
}

/// Linear model over [`DIRECTION_FEATURES`] with no intercept or centering,
/// so swapping the sides negates the margin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionModel {
    pub format_version: u32,
    pub feature_names: Vec<String>,
    pub linear: LinearModel,
}

pub fn direction_params(kind: LinearKind) -> LinearParams {
    LinearParams {
        kind,
        fit_intercept: false,
        center: false,
        ..LinearParams::default()
    }
}

pub fn train_direction(samples: &[DirectionSample], kind: LinearKind) -> Result<DirectionModel> {
    if samples.len() < 2 {
        return Err(Error::EmptyInput("direction model needs at least two merges"));
    }
    let rows: Vec<Vec<f64>> = samples.iter().map(|s| s.features.values.to_vec()).collect();
    let y: Vec<bool> = samples.iter().map(|s| s.label).collect();
    Ok(DirectionModel {
        format_version: super::MODEL_FORMAT_VERSION,
        feature_names: DIRECTION_FEATURES.iter().map(|s| s.to_string()).collect(),
        linear: LinearModel::fit(&rows, &y, &direction_params(kind))?,
    })
}

/// Side predicted to survive; a zero margin goes to side 2.
pub fn predict_direction(m: &DirectionModel, f: &DirectionFeatures) -> Result<Side> {
    let z = m.linear.margin(&f.values)?;
    Ok(if z > 0.0 { Side::Side1 } else { Side::Side2 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub per_fold: Vec<Prf>,
}

/// Stratified k-fold cross-validation; reports fold means.
pub fn cross_validate_direction(
    samples: &[DirectionSample],
    kind: LinearKind,
    folds: usize,
    seed: u64,
) -> Result<CvReport> {
    let y: Vec<bool> = samples.iter().map(|s| s.label).collect();
    let assignment = stratified_folds(&y, folds, seed)?;
    let mut per_fold = Vec::with_capacity(folds);
    for k in 0..folds {
        let train: Vec<DirectionSample> = samples
            .iter()
            .zip(&assignment)
            .filter(|(_, &f)| f != k)
            .map(|(s, _)| s.clone())
            .collect();
        let m = train_direction(&train, kind)?;
        let (mut pred, mut truth) = (Vec::new(), Vec::new());
        for (s, _) in samples.iter().zip(&assignment).filter(|(_, &f)| f == k) {
            pred.push(predict_direction(&m, &s.features)? == Side::Side1);
            truth.push(s.label);
        }
        per_fold.push(prf(&pred, &truth)?);
    }
    let mean = |f: fn(&Prf) -> f64| per_fold.iter().map(f).sum::<f64>() / folds as f64;
    Ok(CvReport {
        folds,
        accuracy: mean(Prf::accuracy),
        precision: mean(|p| p.precision),
        recall: mean(|p| p.recall),
        f_score: mean(|p| p.f_score),
        per_fold,
    })
}
