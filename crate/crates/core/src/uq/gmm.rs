use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{ut_run, CentralMomentSet, GaussianBelief, Propagator, UtParams};
use crate::error::{check_len, Error, Result};
use crate::linalg::Matrix;

/// Weighted sum of Gaussian components.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMixture {
    components: Vec<(f64, GaussianBelief)>,
}

impl GaussianMixture {
    /// Weights must be positive and sum to one within 10⁻¹².
    pub fn new(components: Vec<(f64, GaussianBelief)>) -> Result<Self> {
        let Some((_, first)) = components.first() else {
            return Err(Error::EmptyEnsemble);
        };
        let dim = first.dim();
        for (w, b) in &components {
            check_len(dim, b.dim())?;
            if !(*w > 0.0) {
                return Err(Error::invalid("mixture weights must be positive"));
            }
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("mixture weights must sum to one"));
        }
        Ok(GaussianMixture { components })
    }

    pub fn single(belief: GaussianBelief) -> Self {
        GaussianMixture { components: vec![(1.0, belief)] }
    }

    pub fn components(&self) -> &[(f64, GaussianBelief)] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.components[0].1.dim()
    }

    /// Moment-matched mean and total covariance
    /// `Σ w_ℓ (P_ℓ + (μ_ℓ − μ)(μ_ℓ − μ)ᵀ)`.
    pub fn moments(&self) -> CentralMomentSet {
        let parts: Vec<(f64, &[f64], &Matrix)> =
            self.components.iter().map(|(w, b)| (*w, b.mean(), b.covariance())).collect();
        recombine(&parts)
    }
}

fn recombine(parts: &[(f64, &[f64], &Matrix)]) -> CentralMomentSet {
    let n = parts[0].1.len();
    let mut mean = vec![0.0; n];
    for (w, m, _) in parts {
        for (acc, x) in mean.iter_mut().zip(m.iter()) {
            *acc += w * x;
        }
    }
    let mut cov = Matrix::zeros(n, n);
    for (w, m, p) in parts {
        let d: Vec<f64> = m.iter().zip(&mean).map(|(x, mu)| x - mu).collect();
        for i in 0..n {
            for j in 0..n {
                cov[(i, j)] += w * (p[(i, j)] + d[i] * d[j]);
            }
        }
    }
    CentralMomentSet::gaussian(mean, cov.symmetrized())
}

/// `depth` rounds of binary splitting along each component's dominant eigenvector.
pub fn gmm_split(belief: &GaussianBelief, depth: usize, delta: f64) -> Result<GaussianMixture> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("split parameter must lie in (0, 1)"));
    }
    let mut components = vec![(1.0, belief.clone())];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(2 * components.len());
        for (w, b) in &components {
            let (values, vectors) = b.covariance().symmetric_eigen()?;
            let lambda = values[0];
            let v = vectors.column(0);
            let offset = delta * lambda.sqrt();
            let shrink = Matrix::outer(&v, &v).scale(delta * delta * lambda);
            let cov = b.covariance().sub(&shrink)?.symmetrized();
            for sign in [1.0, -1.0] {
                let mean = b.mean().iter().zip(&v).map(|(m, vi)| m + sign * offset * vi).collect();
                let child = GaussianBelief::new(mean, cov.clone()).map_err(|_| Error::SplitIndefinite)?;
                next.push((0.5 * w, child));
            }
        }
        components = next;
    }
    Ok(GaussianMixture { components })
}

/// Per-component propagation scheme.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ComponentMethod {
    /// Linearization about each component mean.
    LinCov,
    Ut(UtParams),
}

fn component_lincov(prop: &dyn Propagator, b: &GaussianBelief) -> Result<CentralMomentSet> {
    let (xf, jac) = prop.linearize_at(b.mean())?;
    Ok(CentralMomentSet::gaussian(xf, jac.congruence(b.covariance())?.symmetrized()))
}

/// Propagates each component and recombines by moment matching. Failing
/// components are reported together by index.
pub fn gmm_propagate(
    mix: &GaussianMixture,
    prop: &dyn Propagator,
    method: ComponentMethod,
) -> Result<(GaussianMixture, CentralMomentSet)> {
    check_len(prop.dim(), mix.dim())?;
    let mut out = Vec::with_capacity(mix.len());
    let mut failed = Vec::new();
    for (i, (w, b)) in mix.components().iter().enumerate() {
        let moments = match method {
            ComponentMethod::LinCov => component_lincov(prop, b),
            ComponentMethod::Ut(params) => ut_run(prop, b, &params).map(|(_, m)| m),
        };
        match moments {
            Ok(m) => out.push((*w, m)),
            Err(e) if e.is_numerical() => failed.push(i),
            Err(e) => return Err(e),
        }
    }
    if !failed.is_empty() {
        return Err(Error::PropagationFailures { indices: failed });
    }
    let parts: Vec<(f64, &[f64], &Matrix)> = out.iter().map(|(w, m)| (*w, m.mean.as_slice(), &m.cov)).collect();
    let total = recombine(&parts);
    let components = out
        .into_iter()
        .map(|(w, m)| GaussianBelief::from_nearly_symmetric(m.mean, &m.cov).map(|b| (w, b)))
        .collect::<Result<Vec<_>>>()?;
    Ok((GaussianMixture { components }, total))
}
