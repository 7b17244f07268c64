//! Numerical checks of the classifiers and the anomaly filter.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use topicmerge::models::{
    anomaly_score_from_path, average_path_length, IForestParams, IsolationForest, LinearKind, Objective,
};

/// Largest absolute difference between the analytic gradient of the
/// logistic objective and central finite differences, over random problems.
pub fn gradient_error(instances: usize, seed: u64, kind: LinearKind) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let n = rng.random_range(2..=20);
        let d = rng.random_range(1..=5);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        let y: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        let fit_intercept = rng.random_bool(0.5);
        let weights = [rng.random_range(0.1..3.0), rng.random_range(0.1..3.0)];
        let c = rng.random_range(0.1..10.0);
        let obj = Objective::new(&rows, &y, kind, c, weights, fit_intercept);
        let theta: Vec<f64> = (0..obj.n_params()).map(|_| rng.random_range(-2.0..2.0)).collect();
        let g = obj.gradient(&theta);
        for k in 0..theta.len() {
            let (mut up, mut down) = (theta.clone(), theta.clone());
            up[k] += h;
            down[k] -= h;
            let fd = (obj.value(&up) - obj.value(&down)) / (2.0 * h);
            worst = worst.max((fd - g[k]).abs());
        }
    }
    worst
}

/// Score at `E[h] = c(psi)` for every subsample size in `2..=max_psi`;
/// returns the largest deviation from one half.
pub fn half_score_deviation(max_psi: usize) -> f64 {
    (2..=max_psi)
        .map(|psi| (anomaly_score_from_path(average_path_length(psi), psi) - 0.5).abs())
        .fold(0.0, f64::max)
}

/// Seeds out of `seeds` in which a far point planted beside a normal 1-D
/// cluster scores above the cluster's median score.
pub fn planted_outlier_wins(seeds: u64) -> u64 {
    (0..seeds)
        .filter(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let normal = Normal::new(0.0, 1.0).expect("valid");
            let mut rows: Vec<Vec<f64>> = (0..255).map(|_| vec![normal.sample(&mut rng)]).collect();
            rows.push(vec![8.0]);
            let params = IForestParams {
                seed,
                ..IForestParams::default()
            };
            let m = IsolationForest::fit(&rows, &params).expect("fit");
            let mut cluster = m.scores(&rows[..255]).expect("scores");
            cluster.sort_by(f64::total_cmp);
            let median = cluster[127];
            m.score(&[8.0]).expect("score") > median
        })
        .count() as u64
}
