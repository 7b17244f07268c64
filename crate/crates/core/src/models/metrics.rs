use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary precision, recall and F1 with merge as the positive class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl Prf {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f_score = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Prf {
            precision,
            recall,
            f_score,
            tp,
            fp,
            fn_,
            tn,
        }
    }

    pub fn accuracy(&self) -> f64 {
        let n = self.tp + self.fp + self.fn_ + self.tn;
        if n == 0 {
            0.0
        } else {
            (self.tp + self.tn) as f64 / n as f64
        }
    }
}

pub fn prf(predicted: &[bool], actual: &[bool]) -> Result<Prf> {
    if predicted.len() != actual.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: actual.len(),
        });
    }
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for (&p, &a) in predicted.iter().zip(actual) {
        match (p, a) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    Ok(Prf::from_counts(tp, fp, fn_, tn))
}

/// Fold index per row; each class is shuffled with the seed and dealt
/// round-robin so fold class ratios differ by at most one row.
pub fn stratified_folds(labels: &[bool], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 || k > labels.len() {
        return Err(Error::InvalidConfig(format!("{k} folds for {} rows", labels.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold = vec![0; labels.len()];
    let mut next = 0;
    for class in [true, false] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        for i in idx {
            fold[i] = next % k;
            next += 1;
        }
    }
    Ok(fold)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let p = prf(&[true, false, true], &[true, false, true]).unwrap();
        assert_eq!((p.precision, p.recall, p.f_score), (1.0, 1.0, 1.0));

        let p = prf(&[false, false], &[true, false]).unwrap();
        assert_eq!((p.recall, p.f_score), (0.0, 0.0));

        let p = Prf::from_counts(3, 1, 2, 0);
        assert_eq!((p.precision, p.recall), (0.75, 0.6));
        assert!((p.f_score - 0.6667).abs() < 1e-4);

        assert!(matches!(prf(&[true], &[]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn folds_are_stratified() {
        let labels: Vec<bool> = (0..53).map(|i| i % 4 == 0).collect();
        let f = stratified_folds(&labels, 10, 1).unwrap();
        for k in 0..10 {
            let pos = (0..53).filter(|&i| f[i] == k && labels[i]).count();
            assert!((1..=2).contains(&pos));
        }
    }
}
