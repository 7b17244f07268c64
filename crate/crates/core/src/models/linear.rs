//! Standardized L2-regularized linear classifiers.

use serde::{Deserialize, Serialize};

use super::check_rows;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearKind {
    /// Log-loss; scores are probabilities.
    Logistic,
    /// Squared hinge loss; scores are margins.
    Hinge,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassWeights {
    /// `n / (2 n_c)` for class `c`.
    Balanced,
    /// Weights for the negative and positive class.
    Explicit([f64; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    pub kind: LinearKind,
    pub c: f64,
    pub class_weights: ClassWeights,
    pub max_iter: usize,
    pub tol: f64,
    pub fit_intercept: bool,
    /// Subtract feature means before scaling.
    pub center: bool,
}

impl Default for LinearParams {
    fn default() -> Self {
        LinearParams {
            kind: LinearKind::Logistic,
            c: 1.0,
            class_weights: ClassWeights::Balanced,
            max_iter: 10_000,
            tol: 1e-6,
            fit_intercept: true,
            center: true,
        }
    }
}

impl LinearParams {
    pub fn hinge() -> Self {
        LinearParams {
            kind: LinearKind::Hinge,
            ..Self::default()
        }
    }
}

/// Per-feature affine scaling fitted on training rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn identity(dim: usize) -> Self {
        Standardizer {
            mean: vec![0.0; dim],
            std: vec![1.0; dim],
        }
    }

    /// Population mean and standard deviation per column. Constant columns
    /// get a standard deviation of 1. With `center == false` the stored mean
    /// is zero and only scaling is applied.
    pub fn fit(rows: &[Vec<f64>], center: bool) -> Result<Self> {
        let d = check_rows(rows)?;
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for r in rows {
            for (m, x) in mean.iter_mut().zip(r) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for r in rows {
            for ((v, x), m) in var.iter_mut().zip(r).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        let std = var
            .iter()
            .map(|v| {
                let s = (v / n).sqrt();
                if s > 1e-12 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        if !center {
            mean = vec![0.0; d];
        }
        Ok(Standardizer { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn transform_rows(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.transform(r)).collect()
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Class-weighted training loss plus `‖w‖² / (2C)` over already-scaled rows.
/// Parameters are the weights followed by the bias when it is fitted.
pub struct Objective<'a> {
    rows: &'a [Vec<f64>],
    y: &'a [bool],
    kind: LinearKind,
    c: f64,
    class_weights: [f64; 2],
    fit_intercept: bool,
}

impl<'a> Objective<'a> {
    pub fn new(
        rows: &'a [Vec<f64>],
        y: &'a [bool],
        kind: LinearKind,
        c: f64,
        class_weights: [f64; 2],
        fit_intercept: bool,
    ) -> Self {
        Objective {
            rows,
            y,
            kind,
            c,
            class_weights,
            fit_intercept,
        }
    }

    pub fn n_params(&self) -> usize {
        self.rows.first().map_or(0, Vec::len) + usize::from(self.fit_intercept)
    }

    fn margin(&self, theta: &[f64], x: &[f64]) -> f64 {
        let d = x.len();
        let dot: f64 = theta[..d].iter().zip(x).map(|(w, v)| w * v).sum();
        if self.fit_intercept {
            dot + theta[d]
        } else {
            dot
        }
    }

    fn penalty_dim(&self, theta: &[f64]) -> usize {
        theta.len() - usize::from(self.fit_intercept)
    }

    pub fn value(&self, theta: &[f64]) -> f64 {
        let mut loss = 0.0;
        for (x, &y) in self.rows.iter().zip(self.y) {
            let z = self.margin(theta, x);
            let cw = self.class_weights[usize::from(y)];
            loss += cw
                * match self.kind {
                    LinearKind::Logistic => softplus(z) - if y { z } else { 0.0 },
                    LinearKind::Hinge => {
                        let s = if y { 1.0 } else { -1.0 };
                        let m = (1.0 - s * z).max(0.0);
                        m * m
                    }
                };
        }
        let d = self.penalty_dim(theta);
        let norm2: f64 = theta[..d].iter().map(|w| w * w).sum();
        loss + norm2 / (2.0 * self.c)
    }

    pub fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        let d = self.penalty_dim(theta);
        let mut g = vec![0.0; theta.len()];
        for (x, &y) in self.rows.iter().zip(self.y) {
            let z = self.margin(theta, x);
            let cw = self.class_weights[usize::from(y)];
            let dz = cw
                * match self.kind {
                    LinearKind::Logistic => sigmoid(z) - if y { 1.0 } else { 0.0 },
                    LinearKind::Hinge => {
                        let s = if y { 1.0 } else { -1.0 };
                        -2.0 * s * (1.0 - s * z).max(0.0)
                    }
                };
            if dz == 0.0 {
                continue;
            }
            for (gi, xi) in g[..d].iter_mut().zip(x) {
                *gi += dz * xi;
            }
            if self.fit_intercept {
                g[d] += dz;
            }
        }
        for (gi, w) in g[..d].iter_mut().zip(theta) {
            *gi += w / self.c;
        }
        g
    }

    /// Gradient descent with Barzilai-Borwein trial steps and Armijo
    /// backtracking. Returns the parameters and the loss after each accepted
    /// step, starting with the loss at zero.
    pub fn minimize(&self, max_iter: usize, tol: f64) -> (Vec<f64>, Vec<f64>) {
        let mut theta = vec![0.0; self.n_params()];
        let mut f = self.value(&theta);
        let mut g = self.gradient(&theta);
        let mut trace = vec![f];
        let row_norm2 = self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| x * x).sum::<f64>() + f64::from(u8::from(self.fit_intercept)))
            .fold(0.0, f64::max);
        let total_cw: f64 = self.y.iter().map(|&y| self.class_weights[usize::from(y)]).sum();
        let curvature = match self.kind {
            LinearKind::Logistic => 0.25,
            LinearKind::Hinge => 2.0,
        };
        let mut step = 1.0 / (curvature * total_cw * row_norm2 + 1.0 / self.c);

        for _ in 0..max_iter {
            let gnorm2: f64 = g.iter().map(|x| x * x).sum();
            if gnorm2 < 1e-24 {
                break;
            }
            let mut t = step;
            let (cand, fc) = loop {
                let cand: Vec<f64> = theta.iter().zip(&g).map(|(w, gi)| w - t * gi).collect();
                let fc = self.value(&cand);
                if fc <= f - 1e-4 * t * gnorm2 {
                    break (cand, fc);
                }
                t *= 0.5;
                if t < 1e-30 {
                    return (theta, trace);
                }
            };
            let gc = self.gradient(&cand);
            let (mut ss, mut sy) = (0.0, 0.0);
            for i in 0..theta.len() {
                let s = cand[i] - theta[i];
                ss += s * s;
                sy += s * (gc[i] - g[i]);
            }
            step = if sy > 0.0 { ss / sy } else { 2.0 * t };
            let done = (f - fc).abs() <= tol * f.abs().max(1.0);
            theta = cand;
            f = fc;
            g = gc;
            trace.push(f);
            if done {
                break;
            }
        }
        (theta, trace)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub kind: LinearKind,
    /// Weights in standardized feature space.
    pub weights: Vec<f64>,
    pub bias: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub class_weights: [f64; 2],
    pub standardizer: Standardizer,
}

fn resolve_class_weights(y: &[bool], cw: ClassWeights) -> [f64; 2] {
    match cw {
        ClassWeights::Explicit(w) => w,
        ClassWeights::Balanced => {
            let pos = y.iter().filter(|&&v| v).count() as f64;
            let n = y.len() as f64;
            [n / (2.0 * (n - pos)), n / (2.0 * pos)]
        }
    }
}

impl LinearModel {
    /// All-zero model with an identity standardizer.
    pub fn zero(kind: LinearKind, dim: usize) -> Self {
        LinearModel {
            kind,
            weights: vec![0.0; dim],
            bias: 0.0,
            c: 1.0,
            class_weights: [1.0, 1.0],
            standardizer: Standardizer::identity(dim),
        }
    }

    pub fn fit(rows: &[Vec<f64>], y: &[bool], params: &LinearParams) -> Result<Self> {
        Ok(Self::fit_traced(rows, y, params)?.0)
    }

    /// Fits and also returns the loss after every accepted descent step.
    pub fn fit_traced(rows: &[Vec<f64>], y: &[bool], params: &LinearParams) -> Result<(Self, Vec<f64>)> {
        if rows.len() != y.len() {
            return Err(Error::LengthMismatch {
                left: rows.len(),
                right: y.len(),
            });
        }
        if rows.len() < 2 {
            return Err(Error::EmptyInput("linear model needs at least two rows"));
        }
        check_rows(rows)?;
        if y.iter().all(|&v| v) || y.iter().all(|&v| !v) {
            return Err(Error::SingleClass);
        }
        if params.c.is_nan() || params.c <= 0.0 {
            return Err(Error::InvalidConfig(format!("C must be positive, got {}", params.c)));
        }
        let standardizer = Standardizer::fit(rows, params.center)?;
        let scaled = standardizer.transform_rows(rows);
        let class_weights = resolve_class_weights(y, params.class_weights);
        let objective = Objective::new(&scaled, y, params.kind, params.c, class_weights, params.fit_intercept);
        let (theta, trace) = objective.minimize(params.max_iter, params.tol);
        let d = standardizer.dim();
        let model = LinearModel {
            kind: params.kind,
            weights: theta[..d].to_vec(),
            bias: if params.fit_intercept { theta[d] } else { 0.0 },
            c: params.c,
            class_weights,
            standardizer,
        };
        Ok((model, trace))
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn margin(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let z = self.standardizer.transform(x);
        Ok(self.weights.iter().zip(&z).map(|(w, v)| w * v).sum::<f64>() + self.bias)
    }

    /// Probability (logistic) or margin (hinge), and the predicted label.
    pub fn predict(&self, x: &[f64]) -> Result<(f64, bool)> {
        let z = self.margin(x)?;
        Ok(match self.kind {
            LinearKind::Logistic => {
                let p = sigmoid(z);
                (p, p >= 0.5)
            }
            LinearKind::Hinge => (z, z > 0.0),
        })
    }
}

pub fn linear_fit(rows: &[Vec<f64>], y: &[bool], params: &LinearParams) -> Result<LinearModel> {
    LinearModel::fit(rows, y, params)
}

pub fn linear_predict(m: &LinearModel, x: &[f64]) -> Result<(f64, bool)> {
    m.predict(x)
}
