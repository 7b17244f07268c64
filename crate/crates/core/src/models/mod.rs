//! Anomaly filter, linear classifiers, metrics and feature ranking.

mod iforest;
mod linear;
mod metrics;
mod rfe;

pub use iforest::{
    anomaly_score_from_path, average_path_length, iforest_filter, iforest_fit, IForestParams, IsolationForest,
    IsolationTree, Node,
};
pub use linear::{
    linear_fit, linear_predict, sigmoid, ClassWeights, LinearKind, LinearModel, LinearParams, Objective,
    Standardizer,
};
pub use metrics::{prf, stratified_folds, Prf};
pub use rfe::rfe_rank;

use crate::error::{Error, Result};

/// Mixes a base seed with a stream index (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Checks a non-empty rectangular matrix of finite values; returns its width.
pub(crate) fn check_rows(rows: &[Vec<f64>]) -> Result<usize> {
    let Some(first) = rows.first() else {
        return Err(Error::EmptyInput("feature matrix"));
    };
    let d = first.len();
    for (r, row) in rows.iter().enumerate() {
        if row.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: row.len(),
            });
        }
        if let Some(c) = row.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { row: r, column: c });
        }
    }
    Ok(d)
}
