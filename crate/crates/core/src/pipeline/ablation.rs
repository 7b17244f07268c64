use serde::{Deserialize, Serialize};

use super::features::{group_columns, FeatureGroup};
use super::two_step::{evaluate_two_step, train_two_step, PairRow, TwoStepConfig};
use crate::error::{Error, Result};
use crate::models::Prf;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub groups: Vec<FeatureGroup>,
    pub prf: Prf,
}

/// Retrains the two-step model on the columns of `groups` and scores it on
/// the test rows.
#[allow(clippy::too_many_arguments)]
pub fn ablate(
    train_pos: &[PairRow],
    train_neg: &[PairRow],
    anomaly: &[PairRow],
    test_rows: &[Vec<f64>],
    test_labels: &[bool],
    feature_names: &[String],
    groups: &[FeatureGroup],
    cfg: &TwoStepConfig,
) -> Result<Prf> {
    if groups.is_empty() {
        return Err(Error::InvalidConfig("ablation needs at least one feature group".into()));
    }
    let cfg = TwoStepConfig {
        columns: Some(group_columns(groups)),
        ..cfg.clone()
    };
    let m = train_two_step(train_pos, train_neg, anomaly, feature_names, &cfg)?;
    Ok(evaluate_two_step(&m, test_rows, test_labels)?.two_step)
}

/// Every non-empty combination of feature groups, smallest first.
pub fn ablation_table(
    train_pos: &[PairRow],
    train_neg: &[PairRow],
    anomaly: &[PairRow],
    test_rows: &[Vec<f64>],
    test_labels: &[bool],
    feature_names: &[String],
    cfg: &TwoStepConfig,
) -> Result<Vec<AblationRow>> {
    let mut combos: Vec<Vec<FeatureGroup>> = (1u8..8)
        .map(|mask| {
            FeatureGroup::ALL
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &g)| g)
                .collect()
        })
        .collect();
    combos.sort_by_key(|c: &Vec<FeatureGroup>| c.len());
    combos
        .into_iter()
        .map(|groups| {
            let prf = ablate(train_pos, train_neg, anomaly, test_rows, test_labels, feature_names, &groups, cfg)?;
            Ok(AblationRow { groups, prf })
        })
        .collect()
}
