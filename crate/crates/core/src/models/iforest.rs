//! Isolation forest over dense feature rows.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_rows, derive_seed};
use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IForestParams {
    pub n_trees: usize,
    pub subsample: usize,
    /// Expected share of outliers; fixes the score threshold.
    pub contamination: f64,
    pub seed: u64,
}

impl Default for IForestParams {
    fn default() -> Self {
        IForestParams {
            n_trees: 100,
            subsample: 256,
            contamination: 0.2,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: usize,
        value: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        size: usize,
    },
}

/// Nodes in an arena, root first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsolationTree {
    pub nodes: Vec<Node>,
}

impl IsolationTree {
    fn path_length(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        let mut depth = 0.0;
        loop {
            match self.nodes[i] {
                Node::Split {
                    feature,
                    value,
                    left,
                    right,
                } => {
                    i = if x[feature] < value { left } else { right };
                    depth += 1.0;
                }
                Node::Leaf { size } => return depth + average_path_length(size),
            }
        }
    }

    pub fn height(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
                Node::Leaf { .. } => 0,
            }
        }
        walk(&self.nodes, 0)
    }
}

/// Average path length of an unsuccessful binary-search-tree lookup among
/// `n` points; normalizes isolation depths.
pub fn average_path_length(n: usize) -> f64 {
    match n {
        0 | 1 => 0.0,
        2 => 1.0,
        _ => {
            let n = n as f64;
            2.0 * ((n - 1.0).ln() + EULER_GAMMA) - 2.0 * (n - 1.0) / n
        }
    }
}

/// `2^(-E[h(x)] / c(psi))`.
pub fn anomaly_score_from_path(mean_path: f64, psi: usize) -> f64 {
    let c = average_path_length(psi);
    if c == 0.0 {
        return 1.0;
    }
    2f64.powf(-mean_path / c)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsolationForest {
    pub psi: usize,
    pub n_features: usize,
    pub contamination: f64,
    /// Rows scoring strictly above this are kept as outliers.
    pub threshold: f64,
    /// Set when every training row was identical, so all scores tie.
    pub degenerate: bool,
    pub trees: Vec<IsolationTree>,
}

struct TreeBuilder<'a> {
    rows: &'a [Vec<f64>],
    limit: usize,
    nodes: Vec<Node>,
    rng: ChaCha8Rng,
}

impl TreeBuilder<'_> {
    fn grow(&mut self, idx: &mut [usize], depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { size: idx.len() });
        if depth >= self.limit || idx.len() <= 1 {
            return id;
        }
        let d = self.rows[idx[0]].len();
        let ranges: Vec<(usize, f64, f64)> = (0..d)
            .filter_map(|f| {
                let (lo, hi) = idx.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
                    let v = self.rows[r][f];
                    (lo.min(v), hi.max(v))
                });
                (hi > lo).then_some((f, lo, hi))
            })
            .collect();
        if ranges.is_empty() {
            return id;
        }
        let (feature, lo, hi) = ranges[self.rng.random_range(0..ranges.len())];
        let value = self.rng.random_range(lo..hi);
        let mut split = 0;
        for i in 0..idx.len() {
            if self.rows[idx[i]][feature] < value {
                idx.swap(i, split);
                split += 1;
            }
        }
        let (l, r) = idx.split_at_mut(split);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            value,
            left,
            right,
        };
        id
    }
}

impl IsolationForest {
    pub fn fit(rows: &[Vec<f64>], params: &IForestParams) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::EmptyInput("isolation forest needs at least two rows"));
        }
        let n_features = check_rows(rows)?;
        if !(params.contamination > 0.0 && params.contamination < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "contamination {} outside (0, 1)",
                params.contamination
            )));
        }
        if params.n_trees == 0 || params.subsample < 2 {
            return Err(Error::InvalidConfig("need at least one tree and a subsample of 2".into()));
        }
        let psi = params.subsample.min(rows.len());
        let limit = (psi as f64).log2().ceil() as usize;

        let trees: Vec<IsolationTree> = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(params.seed, t as u64));
                let mut idx = index::sample(&mut rng, rows.len(), psi).into_vec();
                idx.sort_unstable();
                let mut b = TreeBuilder {
                    rows,
                    limit,
                    nodes: Vec::new(),
                    rng,
                };
                b.grow(&mut idx, 0);
                IsolationTree { nodes: b.nodes }
            })
            .collect();

        let degenerate = rows.iter().all(|r| r == &rows[0]);
        let mut model = IsolationForest {
            psi,
            n_features,
            contamination: params.contamination,
            threshold: 0.0,
            degenerate,
            trees,
        };
        let mut scores = model.scores(rows)?;
        scores.sort_by(f64::total_cmp);
        model.threshold = quantile_sorted(&scores, 1.0 - params.contamination);
        Ok(model)
    }

    pub fn mean_path_length(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.path_length(x)).sum::<f64>() / self.trees.len() as f64
    }

    pub fn score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                actual: x.len(),
            });
        }
        Ok(anomaly_score_from_path(self.mean_path_length(x), self.psi))
    }

    pub fn scores(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        rows.par_iter().map(|r| self.score(r)).collect()
    }

    pub fn is_outlier(&self, x: &[f64]) -> Result<bool> {
        Ok(self.score(x)? > self.threshold)
    }

    /// Indices of rows scoring above the contamination threshold.
    pub fn filter(&self, rows: &[Vec<f64>]) -> Result<Vec<usize>> {
        let scores = self.scores(rows)?;
        Ok(scores
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > self.threshold)
            .map(|(i, _)| i)
            .collect())
    }
}

pub fn iforest_fit(rows: &[Vec<f64>], params: &IForestParams) -> Result<IsolationForest> {
    IsolationForest::fit(rows, params)
}

pub fn iforest_filter(model: &IsolationForest, rows: &[Vec<f64>]) -> Result<Vec<usize>> {
    model.filter(rows)
}

/// Linear-interpolated quantile of ascending data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(seed: u64) -> IForestParams {
        IForestParams {
            seed,
            ..IForestParams::default()
        }
    }

    #[test]
    fn expected_path_equal_to_normalizer_scores_one_half() {
        for psi in [2, 16, 256] {
            let s = anomaly_score_from_path(average_path_length(psi), psi);
            assert!((s - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn subsample_is_clamped_and_height_capped() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64, (i * 7 % 13) as f64]).collect();
        let m = IsolationForest::fit(&rows, &params(3)).unwrap();
        assert_eq!(m.psi, 40);
        let cap = (40f64).log2().ceil() as usize;
        assert!(m.trees.iter().all(|t| t.height() <= cap));
    }

    #[test]
    fn planted_point_outscores_cluster() {
        let mut rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 / 10.0]).collect();
        rows.push(vec![10.0]);
        let m = IsolationForest::fit(&rows, &params(11)).unwrap();
        assert!(m.score(&[10.0]).unwrap() > m.score(&[0.5]).unwrap());
    }

    #[test]
    fn contamination_keeps_about_a_fifth() {
        let rows: Vec<Vec<f64>> = (0..500)
            .map(|i| vec![((i * 37) % 101) as f64, ((i * 53) % 89) as f64 / 3.0])
            .collect();
        let m = IsolationForest::fit(&rows, &params(5)).unwrap();
        let kept = m.filter(&rows).unwrap().len();
        assert!((99..=101).contains(&kept), "kept {kept}");
    }

    #[test]
    fn identical_rows_are_flagged_and_all_dropped() {
        let rows = vec![vec![1.0, 2.0]; 20];
        let m = IsolationForest::fit(&rows, &params(1)).unwrap();
        assert!(m.degenerate);
        let scores = m.scores(&rows).unwrap();
        assert!(scores.iter().all(|&s| s == scores[0]));
        assert!(m.filter(&rows).unwrap().is_empty());
    }

    #[test]
    fn errors() {
        assert!(matches!(IsolationForest::fit(&[vec![1.0]], &params(0)), Err(Error::EmptyInput(_))));
        let m = IsolationForest::fit(&[vec![1.0], vec![2.0]], &params(0)).unwrap();
        assert!(matches!(m.score(&[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
    }
}
