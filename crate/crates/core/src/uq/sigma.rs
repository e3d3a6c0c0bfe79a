use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{GaussianBelief, WeightedEnsemble};
use crate::error::{Error, Result};

/// Scaled unscented-transform parameters: `λ = α²(N + κ) − N`, mean weights
/// `λ/(N + λ)` and `1/(2(N + λ))`, and an extra `1 − α² + β` on the center
/// covariance weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UtParams {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
}

impl Default for UtParams {
    /// `α = 10⁻³`, `β = 2`, `κ = 0`.
    fn default() -> Self {
        UtParams { alpha: 1e-3, beta: 2.0, kappa: 0.0 }
    }
}

impl UtParams {
    /// Unscaled set with the given `λ` (`α = 1`, `β = 0`, `κ = λ`).
    pub fn from_lambda(lambda: f64) -> Self {
        UtParams { alpha: 1.0, beta: 0.0, kappa: lambda }
    }

    /// `λ = 3 − N`.
    pub fn classic(n: usize) -> Self {
        Self::from_lambda(3.0 - n as f64)
    }

    pub fn lambda(&self, n: usize) -> f64 {
        let nf = n as f64;
        self.alpha * self.alpha * (nf + self.kappa) - nf
    }

    /// Added to the center's mean weight to form its covariance weight.
    pub fn center_covariance_extra(&self) -> f64 {
        1.0 - self.alpha * self.alpha + self.beta
    }
}

/// Symmetric set `mean ± √((N + λ) P)` (center first) carrying the mean weights.
pub fn ut_points(belief: &GaussianBelief, params: &UtParams) -> Result<WeightedEnsemble> {
    let n = belief.dim();
    let lambda = params.lambda(n);
    let spread = n as f64 + lambda;
    if !(spread > 0.0) {
        return Err(Error::invalid("UT requires N + λ > 0"));
    }
    let scale = spread.sqrt();
    let l = belief.cholesky();
    let mut states = Vec::with_capacity(2 * n + 1);
    let mut weights = Vec::with_capacity(2 * n + 1);
    states.push(belief.mean().to_vec());
    weights.push(lambda / spread);
    for j in 0..n {
        for sign in [1.0, -1.0] {
            states.push((0..n).map(|i| belief.mean()[i] + sign * scale * l[(i, j)]).collect());
            weights.push(0.5 / spread);
        }
    }
    WeightedEnsemble::new(weights, states)
}

/// Radii and weights of the fourth-order conjugate unscented set in dimension `N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cut4Constants {
    pub r1_sq: f64,
    pub r2_sq: f64,
    pub w1: f64,
    pub w2: f64,
}

impl Cut4Constants {
    pub fn for_dim(n: usize) -> Result<Self> {
        if !(3..=20).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        let nf = n as f64;
        Ok(Cut4Constants {
            r1_sq: (nf + 2.0) / 2.0,
            r2_sq: nf * (nf + 2.0) / (nf - 2.0),
            w1: 4.0 / (nf + 2.0).powi(2),
            w2: (nf - 2.0).powi(2) / (2f64.powi(n as i32) * (nf + 2.0).powi(2)),
        })
    }

    /// Point count before removing the zero-weight center.
    pub fn point_count_with_center(n: usize) -> usize {
        1 + 2 * n + (1usize << n)
    }
}

/// Standard-normal CUT4 set: `2N` axis points at radius `r₁` and `2^N` conjugate points
/// `r₂ (±1, …, ±1)/√N`; the zero-weight center is omitted.
pub fn standard_cut4(n: usize) -> Result<WeightedEnsemble> {
    let c = Cut4Constants::for_dim(n)?;
    let r1 = c.r1_sq.sqrt();
    let corner = (c.r2_sq / n as f64).sqrt();
    let mut states = Vec::with_capacity(2 * n + (1 << n));
    let mut weights = Vec::with_capacity(states.capacity());
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut p = vec![0.0; n];
            p[i] = sign * r1;
            states.push(p);
            weights.push(c.w1);
        }
    }
    for mask in 0..(1usize << n) {
        states.push((0..n).map(|i| if mask >> i & 1 == 0 { corner } else { -corner }).collect());
        weights.push(c.w2);
    }
    WeightedEnsemble::new(weights, states)
}

/// CUT4 set of `belief`: the standard set mapped through `mean + L z`.
pub fn cut4_points(belief: &GaussianBelief) -> Result<WeightedEnsemble> {
    let std = standard_cut4(belief.dim())?;
    let states = std.states().iter().map(|z| belief.transform_standard(z)).collect::<Result<Vec<_>>>()?;
    std.with_states(states)
}
