//! Candidate generation, featurization, two-step training and prediction,
//! merge direction, early detection and ablation.

mod ablation;
mod candidates;
mod dataset;
mod direction;
mod early;
mod features;
mod index;
mod two_step;

pub use ablation::{ablate, ablation_table, AblationRow};
pub use candidates::{generate_candidates, passes_name_filters, FilterConfig};
pub use dataset::{
    build_dataset, featurize_dataset, load_truth, write_truth, Dataset, DatasetConfig, FeaturizedDataset,
    LabeledPair, Split, TruthRecord,
};
pub use direction::{
    cross_validate_direction, direction_featurize, direction_featurize_ordered, direction_params, direction_samples,
    predict_direction, train_direction, CvReport, DirectionFeatures, DirectionModel, DirectionSample, Side,
    DIRECTION_FEATURES,
};
pub use early::{add_months, early_eval, EarlyPoint};
pub use features::{
    feature_names, featurize_pair, group_columns, FeatureContext, FeatureGroup, FeatureSpec, Resources, CATALOG,
    FEATURE_COUNT,
};
pub use index::CorpusIndex;
pub use two_step::{
    evaluate_two_step, predict_classifier_only, predict_two_step, train_two_step, Evaluation, PairRow, Prediction,
    Stage, TwoStepConfig, TwoStepModel, MODEL_FORMAT_VERSION,
};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, TopicId};
use crate::error::{Error, Result};

/// Where a pair came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    Merge,
    Unmerge,
    Neighbor,
    Generated,
}

impl PairKind {
    pub fn name(self) -> &'static str {
        match self {
            PairKind::Merge => "merge",
            PairKind::Unmerge => "unmerge",
            PairKind::Neighbor => "neighbor",
            PairKind::Generated => "generated",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [PairKind::Merge, PairKind::Unmerge, PairKind::Neighbor, PairKind::Generated]
            .into_iter()
            .find(|k| k.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CandidatePair {
    pub t1: TopicId,
    pub t2: TopicId,
    pub provenance: PairKind,
}

/// Orders two `(name, id)` topics by name, then id.
pub fn canonical_pair(a: (&str, &TopicId), b: (&str, &TopicId)) -> (TopicId, TopicId) {
    if (a.0, a.1) <= (b.0, b.1) {
        (a.1.clone(), b.1.clone())
    } else {
        (b.1.clone(), a.1.clone())
    }
}

/// [`canonical_pair`] looking names up in the corpus.
pub fn canonical_ids(c: &Corpus, a: &TopicId, b: &TopicId) -> Result<(TopicId, TopicId)> {
    let name = |t: &TopicId| {
        c.topic(t)
            .map(|x| x.name.as_str())
            .ok_or_else(|| Error::UnknownTopic(t.0.clone()))
    };
    Ok(canonical_pair((name(a)?, a), (name(b)?, b)))
}
