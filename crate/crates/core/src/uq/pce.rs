use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{
    method_rng, propagate_ensemble, weighted_central_moments, CentralMomentSet, GaussianBelief, MethodStream,
    Propagator, WeightedEnsemble,
};
use crate::error::{check_len, Error, Result};
use crate::linalg::Matrix;
use crate::poly::{MultiIndex, PolyContext};

/// Surrogate evaluations used for third and fourth moments.
pub const PCE_MOMENT_SAMPLES: usize = 200_000;

/// Probabilists' Hermite polynomials `He₀(x) … He_p(x)`.
pub fn hermite(x: f64, p: usize) -> Vec<f64> {
    let mut he = Vec::with_capacity(p + 1);
    he.push(1.0);
    if p >= 1 {
        he.push(x);
    }
    for k in 1..p {
        let next = x * he[k] - k as f64 * he[k - 1];
        he.push(next);
    }
    he
}

/// Total-degree Hermite chaos `y(ξ) = Σ_α c_α Ψ_α(ξ)` with `ξ ~ N(0, I)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PceSurrogate {
    n_xi: usize,
    degree: usize,
    indices: Vec<MultiIndex>,
    /// `coeffs[k]` is the output vector multiplying basis `k`.
    coeffs: Vec<Vec<f64>>,
    norms: Vec<f64>,
}

impl PceSurrogate {
    pub fn input_dim(&self) -> usize {
        self.n_xi
    }

    pub fn output_dim(&self) -> usize {
        self.coeffs[0].len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Multi-index set in graded order; the zero index comes first.
    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    /// `h_α = E[Ψ_α²] = Π α_k!`.
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> Option<&[f64]> {
        self.indices.iter().position(|a| a == alpha).map(|k| self.coeffs[k].as_slice())
    }

    fn basis_values(&self, xi: &[f64], out: &mut [f64]) {
        basis_values(&self.indices, self.degree, xi, out);
    }

    pub fn evaluate(&self, xi: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n_xi, xi.len())?;
        let mut psi = vec![0.0; self.indices.len()];
        self.basis_values(xi, &mut psi);
        let mut y = vec![0.0; self.output_dim()];
        for (c, p) in self.coeffs.iter().zip(&psi) {
            for (yi, ci) in y.iter_mut().zip(c) {
                *yi += ci * p;
            }
        }
        Ok(y)
    }

    /// Algebraic mean `c₀` and covariance `Σ_{α≠0} h_α c_α c_αᵀ`.
    pub fn mean_covariance(&self) -> (Vec<f64>, Matrix) {
        let n = self.output_dim();
        let mut cov = Matrix::zeros(n, n);
        for (c, h) in self.coeffs.iter().zip(&self.norms).skip(1) {
            for i in 0..n {
                for j in 0..n {
                    cov[(i, j)] += h * c[i] * c[j];
                }
            }
        }
        (self.coeffs[0].clone(), cov)
    }

    /// Moments of `n` surrogate evaluations at seeded standard-normal inputs.
    pub fn sampled_moments(&self, n: usize, max_order: usize, seed: u64) -> Result<CentralMomentSet> {
        let mut rng = method_rng(seed, MethodStream::PceMoments);
        let mut xi = vec![0.0; self.n_xi];
        let mut psi = vec![0.0; self.indices.len()];
        let mut states = Vec::with_capacity(n);
        for _ in 0..n {
            for v in xi.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            self.basis_values(&xi, &mut psi);
            let mut y = vec![0.0; self.output_dim()];
            for (c, p) in self.coeffs.iter().zip(&psi) {
                for (yi, ci) in y.iter_mut().zip(c) {
                    *yi += ci * p;
                }
            }
            states.push(y);
        }
        weighted_central_moments(&WeightedEnsemble::uniform(states)?, max_order)
    }
}

fn basis_values(indices: &[MultiIndex], degree: usize, xi: &[f64], out: &mut [f64]) {
    let he: Vec<Vec<f64>> = xi.iter().map(|&x| hermite(x, degree)).collect();
    for (o, alpha) in out.iter_mut().zip(indices) {
        *o = alpha.exponents().iter().enumerate().map(|(k, &e)| he[k][e as usize]).product();
    }
}

/// Non-intrusive least-squares fit on `ceil(oversample · |𝒜|)` seeded inputs
/// `δ = μ₀ + L ξ`, solved by Householder QR.
pub fn pce_fit(
    prop: &dyn Propagator,
    belief: &GaussianBelief,
    degree: usize,
    oversample: f64,
    seed: u64,
) -> Result<PceSurrogate> {
    check_len(prop.dim(), belief.dim())?;
    if degree == 0 || degree > crate::poly::MAX_ORDER as usize {
        return Err(Error::invalid("PCE degree must lie in 1..=10"));
    }
    let n = belief.dim();
    let ctx = PolyContext::new(n, degree as u8)?;
    let indices = ctx.monomials().to_vec();
    let m = (oversample * indices.len() as f64).ceil();
    if !(m >= indices.len() as f64) {
        return Err(Error::invalid("oversampling factor must give at least as many samples as basis terms"));
    }
    let m = m as usize;

    let mut rng = method_rng(seed, MethodStream::PceDesign);
    let mut xis = Vec::with_capacity(m);
    let mut deviations = Vec::with_capacity(m);
    for _ in 0..m {
        let xi: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        deviations.push(belief.transform_standard(&xi)?);
        xis.push(xi);
    }
    let outputs = propagate_ensemble(prop, &WeightedEnsemble::uniform(deviations)?)?;

    let p = indices.len();
    let mut design = Matrix::zeros(m, p);
    let mut row = vec![0.0; p];
    for (r, xi) in xis.iter().enumerate() {
        basis_values(&indices, degree, xi, &mut row);
        for (c, v) in row.iter().enumerate() {
            design[(r, c)] = *v;
        }
    }
    let out_dim = outputs.dim();
    let rhs = Matrix::from_fn(m, out_dim, |r, c| outputs.states()[r][c]);
    let solution = design.least_squares(&rhs)?;
    let coeffs = (0..p).map(|k| solution.row(k).to_vec()).collect();
    let norms = indices.iter().map(|a| a.factorial() as f64).collect();
    Ok(PceSurrogate { n_xi: n, degree, indices, coeffs, norms })
}

/// Mean and covariance from the coefficients; third and fourth moments (when
/// `max_order > 2`) from [`PCE_MOMENT_SAMPLES`] surrogate evaluations.
pub fn pce_moments(s: &PceSurrogate, max_order: usize, seed: u64) -> Result<CentralMomentSet> {
    let (mean, cov) = s.mean_covariance();
    if max_order <= 2 {
        return Ok(CentralMomentSet::gaussian(mean, cov));
    }
    let sampled = s.sampled_moments(PCE_MOMENT_SAMPLES, max_order, seed)?;
    Ok(CentralMomentSet { mean, cov, third: sampled.third, fourth: sampled.fourth })
}
