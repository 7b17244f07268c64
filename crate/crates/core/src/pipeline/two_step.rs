use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::TopicId;
use crate::error::{Error, Result};
use crate::models::{
    derive_seed, prf, IForestParams, IsolationForest, LinearKind, LinearModel, LinearParams, Prf, Standardizer,
};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct PairRow {
    pub t1: TopicId,
    pub t2: TopicId,
    pub features: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TwoStepConfig {
    pub iforest: IForestParams,
    pub linear: LinearParams,
    /// Catalog columns the model sees; `None` means all of them.
    pub columns: Option<Vec<usize>>,
    pub seed: u64,
}


/// Isolation-forest filter followed by a logistic classifier, both over the
/// same column subset of the feature catalog.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoStepModel {
    pub feature_names: Vec<String>,
    pub columns: Vec<usize>,
    pub iforest: IsolationForest,
    pub classifier: LinearModel,
}

#[derive(Serialize, Deserialize)]
struct LinearDoc {
    kind: LinearKind,
    weights: Vec<f64>,
    bias: f64,
    #[serde(rename = "C")]
    c: f64,
    class_weights: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    format_version: u32,
    feature_names: Vec<String>,
    columns: Vec<usize>,
    standardizer: Standardizer,
    linear: LinearDoc,
    iforest: IsolationForest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Filtered,
    Classified,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Filtered => "filtered",
            Stage::Classified => "classified",
        }
    }
}

/// Filtered pairs carry their anomaly score and a negative label; classified
/// pairs carry the classifier probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prediction {
    pub stage: Stage,
    pub score: f64,
    pub label: bool,
}

fn select(row: &[f64], columns: &[usize]) -> Vec<f64> {
    columns.iter().map(|&c| row[c]).collect()
}

fn pair_key(r: &PairRow) -> (TopicId, TopicId) {
    if r.t1 <= r.t2 {
        (r.t1.clone(), r.t2.clone())
    } else {
        (r.t2.clone(), r.t1.clone())
    }
}

pub fn train_two_step(
    train_pos: &[PairRow],
    train_neg: &[PairRow],
    anomaly_train: &[PairRow],
    feature_names: &[String],
    cfg: &TwoStepConfig,
) -> Result<TwoStepModel> {
    let negatives: HashSet<(TopicId, TopicId)> = train_neg.iter().map(pair_key).collect();
    let mut clash: Vec<String> = anomaly_train
        .iter()
        .map(pair_key)
        .filter(|k| negatives.contains(k))
        .map(|(a, b)| format!("{a}|{b}"))
        .collect();
    if !clash.is_empty() {
        clash.sort();
        clash.dedup();
        return Err(Error::OverlappingPairs(clash));
    }
    let width = feature_names.len();
    let columns: Vec<usize> = cfg.columns.clone().unwrap_or_else(|| (0..width).collect());
    if columns.is_empty() {
        return Err(Error::InvalidConfig("no feature columns selected".into()));
    }
    if let Some(&bad) = columns.iter().find(|&&c| c >= width) {
        return Err(Error::DimensionMismatch {
            expected: width,
            actual: bad + 1,
        });
    }
    for r in train_pos.iter().chain(train_neg).chain(anomaly_train) {
        if r.features.len() != width {
            return Err(Error::DimensionMismatch {
                expected: width,
                actual: r.features.len(),
            });
        }
    }

    let anomaly_rows: Vec<Vec<f64>> = anomaly_train.iter().map(|r| select(&r.features, &columns)).collect();
    let iforest_params = IForestParams {
        seed: derive_seed(cfg.seed, 1),
        ..cfg.iforest.clone()
    };
    let iforest = IsolationForest::fit(&anomaly_rows, &iforest_params)?;

    let rows: Vec<Vec<f64>> = train_pos
        .iter()
        .chain(train_neg)
        .map(|r| select(&r.features, &columns))
        .collect();
    let y: Vec<bool> = (0..rows.len()).map(|i| i < train_pos.len()).collect();
    let linear = LinearParams {
        kind: LinearKind::Logistic,
        ..cfg.linear.clone()
    };
    let classifier = LinearModel::fit(&rows, &y, &linear)?;

    Ok(TwoStepModel {
        feature_names: feature_names.to_vec(),
        columns,
        iforest,
        classifier,
    })
}

impl TwoStepModel {
    fn check(&self, row: &[f64]) -> Result<()> {
        if row.len() != self.feature_names.len() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_names.len(),
                actual: row.len(),
            });
        }
        Ok(())
    }

    /// Runs the filter and, for survivors only, the classifier.
    pub fn predict(&self, row: &[f64]) -> Result<Prediction> {
        self.check(row)?;
        let x = select(row, &self.columns);
        let anomaly = self.iforest.score(&x)?;
        if anomaly <= self.iforest.threshold {
            return Ok(Prediction {
                stage: Stage::Filtered,
                score: anomaly,
                label: false,
            });
        }
        let (p, label) = self.classifier.predict(&x)?;
        Ok(Prediction {
            stage: Stage::Classified,
            score: p,
            label,
        })
    }

    /// The classifier alone, without the filter.
    pub fn classify(&self, row: &[f64]) -> Result<(f64, bool)> {
        self.check(row)?;
        self.classifier.predict(&select(row, &self.columns))
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ModelDoc {
            format_version: MODEL_FORMAT_VERSION,
            feature_names: self.feature_names.clone(),
            columns: self.columns.clone(),
            standardizer: self.classifier.standardizer.clone(),
            linear: LinearDoc {
                kind: self.classifier.kind,
                weights: self.classifier.weights.clone(),
                bias: self.classifier.bias,
                c: self.classifier.c,
                class_weights: self.classifier.class_weights,
            },
            iforest: self.iforest.clone(),
        };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ModelDoc = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported format_version {}", doc.format_version)));
        }
        let d = doc.columns.len();
        if doc.linear.weights.len() != d || doc.standardizer.dim() != d || doc.iforest.n_features != d {
            return Err(Error::Format("component dimensions disagree".into()));
        }
        Ok(TwoStepModel {
            feature_names: doc.feature_names,
            columns: doc.columns,
            iforest: doc.iforest,
            classifier: LinearModel {
                kind: doc.linear.kind,
                weights: doc.linear.weights,
                bias: doc.linear.bias,
                c: doc.linear.c,
                class_weights: doc.linear.class_weights,
                standardizer: doc.standardizer,
            },
        })
    }
}

pub fn predict_two_step(m: &TwoStepModel, rows: &[Vec<f64>]) -> Result<Vec<Prediction>> {
    rows.par_iter().map(|r| m.predict(r)).collect()
}

pub fn predict_classifier_only(m: &TwoStepModel, rows: &[Vec<f64>]) -> Result<Vec<(f64, bool)>> {
    rows.par_iter().map(|r| m.classify(r)).collect()
}

/// Two-step and classifier-only scores on the same labeled rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub two_step: Prf,
    pub classifier_only: Prf,
    pub kept: usize,
    pub predictions: Vec<Prediction>,
}

pub fn evaluate_two_step(m: &TwoStepModel, rows: &[Vec<f64>], labels: &[bool]) -> Result<Evaluation> {
    let predictions = predict_two_step(m, rows)?;
    let alone = predict_classifier_only(m, rows)?;
    let two: Vec<bool> = predictions.iter().map(|p| p.label).collect();
    let one: Vec<bool> = alone.iter().map(|p| p.1).collect();
    Ok(Evaluation {
        two_step: prf(&two, labels)?,
        classifier_only: prf(&one, labels)?,
        kept: predictions.iter().filter(|p| p.stage == Stage::Classified).count(),
        predictions,
    })
}
