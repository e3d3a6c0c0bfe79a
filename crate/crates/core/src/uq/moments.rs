use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::linalg::Matrix;

/// Weighted point set: Monte Carlo samples (uniform weights) or a sigma set.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedEnsemble {
    weights: Vec<f64>,
    states: Vec<Vec<f64>>,
}

impl WeightedEnsemble {
    /// Weights must sum to one within 10⁻¹² of their absolute sum; states must
    /// share one dimension.
    pub fn new(weights: Vec<f64>, states: Vec<Vec<f64>>) -> Result<Self> {
        check_len(weights.len(), states.len())?;
        if states.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let n = states[0].len();
        for s in &states {
            check_len(n, s.len())?;
        }
        let total: f64 = weights.iter().sum();
        let magnitude: f64 = weights.iter().map(|w| w.abs()).sum();
        if !((total - 1.0).abs() <= 1e-12 * magnitude.max(1.0)) {
            return Err(Error::invalid(alloc::format!("ensemble weights sum to {total}, not 1")));
        }
        Ok(WeightedEnsemble { weights, states })
    }

    /// Equal weights `1/n`.
    pub fn uniform(states: Vec<Vec<f64>>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let w = 1.0 / states.len() as f64;
        let weights = vec![w; states.len()];
        // Uniform weights can miss 1 by rounding for large n; skip the sum check.
        let n = states[0].len();
        for s in &states {
            check_len(n, s.len())?;
        }
        Ok(WeightedEnsemble { weights, states })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    /// Same weights, new states (e.g. after propagation).
    pub fn with_states(&self, states: Vec<Vec<f64>>) -> Result<Self> {
        check_len(self.len(), states.len())?;
        Ok(WeightedEnsemble { weights: self.weights.clone(), states })
    }

    /// Restriction to the given state components.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.dim()) {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: bad + 1 });
        }
        let states = self.states.iter().map(|s| indices.iter().map(|&i| s[i]).collect()).collect();
        Ok(WeightedEnsemble { weights: self.weights.clone(), states })
    }

    pub fn weighted_mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.dim()];
        for (w, s) in self.weights.iter().zip(&self.states) {
            for (m, x) in mean.iter_mut().zip(s) {
                *m += w * x;
            }
        }
        mean
    }
}

/// Fully symmetric tensor stored by sorted index tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricTensor {
    dim: usize,
    order: usize,
    keys: Vec<Vec<usize>>,
    values: Vec<f64>,
}

impl SymmetricTensor {
    pub fn zeros(dim: usize, order: usize) -> Self {
        let mut keys = Vec::new();
        let mut current = Vec::with_capacity(order);
        sorted_tuples(dim, order, 0, &mut current, &mut keys);
        let values = vec![0.0; keys.len()];
        SymmetricTensor { dim, order, keys, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Stored (non-decreasing index tuple, value) pairs in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        self.keys.iter().map(|k| k.as_slice()).zip(self.values.iter().copied())
    }

    /// Entry at any index permutation.
    pub fn get(&self, index: &[usize]) -> f64 {
        assert_eq!(index.len(), self.order, "tensor index has the wrong order");
        let mut key = index.to_vec();
        key.sort_unstable();
        match self.keys.binary_search(&key) {
            Ok(pos) => self.values[pos],
            Err(_) => panic!("tensor index out of range"),
        }
    }

    pub fn set(&mut self, index: &[usize], value: f64) {
        let mut key = index.to_vec();
        key.sort_unstable();
        let pos = self.keys.binary_search(&key).expect("tensor index out of range");
        self.values[pos] = value;
    }

    fn accumulate(&mut self, w: f64, d: &[f64]) {
        for (key, v) in self.keys.iter().zip(self.values.iter_mut()) {
            let mut p = w;
            for &i in key {
                p *= d[i];
            }
            *v += p;
        }
    }
}

fn sorted_tuples(dim: usize, order: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if current.len() == order {
        out.push(current.clone());
        return;
    }
    for i in start..dim {
        current.push(i);
        sorted_tuples(dim, order, i, current, out);
        current.pop();
    }
}

/// Mean, covariance and optional third/fourth central moments.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralMomentSet {
    pub mean: Vec<f64>,
    pub cov: Matrix,
    pub third: Option<SymmetricTensor>,
    pub fourth: Option<SymmetricTensor>,
}

impl CentralMomentSet {
    pub fn gaussian(mean: Vec<f64>, cov: Matrix) -> Self {
        CentralMomentSet { mean, cov, third: None, fourth: None }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Highest moment order carried (2, 3 or 4).
    pub fn max_order(&self) -> usize {
        if self.fourth.is_some() {
            4
        } else if self.third.is_some() {
            3
        } else {
            2
        }
    }
}

/// Weighted mean, then weighted moments of the centered states up to `max_order`.
pub fn weighted_central_moments(ens: &WeightedEnsemble, max_order: usize) -> Result<CentralMomentSet> {
    if ens.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if !(2..=4).contains(&max_order) {
        return Err(Error::invalid("moment order must be 2, 3 or 4"));
    }
    let n = ens.dim();
    let mean = ens.weighted_mean();
    let mut cov = Matrix::zeros(n, n);
    let mut third = (max_order >= 3).then(|| SymmetricTensor::zeros(n, 3));
    let mut fourth = (max_order >= 4).then(|| SymmetricTensor::zeros(n, 4));
    let mut d = vec![0.0; n];
    for (w, s) in ens.weights.iter().zip(&ens.states) {
        for i in 0..n {
            d[i] = s[i] - mean[i];
        }
        for i in 0..n {
            for j in i..n {
                cov[(i, j)] += w * d[i] * d[j];
            }
        }
        if let Some(t) = third.as_mut() {
            t.accumulate(*w, &d);
        }
        if let Some(t) = fourth.as_mut() {
            t.accumulate(*w, &d);
        }
    }
    for i in 0..n {
        for j in 0..i {
            cov[(i, j)] = cov[(j, i)];
        }
    }
    Ok(CentralMomentSet { mean, cov, third, fourth })
}

/// Sample mean and the unbiased `1/(n − 1)` sample covariance (weights ignored).
pub fn sample_mean_covariance(ens: &WeightedEnsemble) -> Result<CentralMomentSet> {
    let count = ens.len();
    if count < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: count });
    }
    let n = ens.dim();
    let mut mean = vec![0.0; n];
    for s in &ens.states {
        for (m, x) in mean.iter_mut().zip(s) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= count as f64;
    }
    let mut cov = Matrix::zeros(n, n);
    for s in &ens.states {
        for i in 0..n {
            let di = s[i] - mean[i];
            for j in i..n {
                cov[(i, j)] += di * (s[j] - mean[j]);
            }
        }
    }
    let scale = 1.0 / (count - 1) as f64;
    for i in 0..n {
        for j in i..n {
            cov[(i, j)] *= scale;
            cov[(j, i)] = cov[(i, j)];
        }
    }
    Ok(CentralMomentSet::gaussian(mean, cov))
}
