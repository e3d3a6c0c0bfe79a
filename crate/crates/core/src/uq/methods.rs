use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use super::{
    cut4_points, method_rng, ut_points, weighted_central_moments, CentralMomentSet,
    GaussianBelief, MethodStream, Propagator, UtParams, WeightedEnsemble,
};
use crate::error::{check_len, Error, Result};
use crate::linalg::Matrix;

/// `n` draws `mean + L z`, `z ~ N(0, I)`, from the sampling stream of `seed`.
pub fn sample_gaussian(belief: &GaussianBelief, n: usize, seed: u64) -> Result<WeightedEnsemble> {
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let mut rng = method_rng(seed, MethodStream::Sampling);
    let dim = belief.dim();
    let mut z = alloc::vec![0.0; dim];
    let states = (0..n)
        .map(|_| {
            for v in z.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            belief.transform_standard(&z)
        })
        .collect::<Result<Vec<_>>>()?;
    WeightedEnsemble::uniform(states)
}

/// Propagates every member, keeping the weights; all failing indices are reported together.
pub fn propagate_ensemble(prop: &dyn Propagator, ens: &WeightedEnsemble) -> Result<WeightedEnsemble> {
    check_len(prop.dim(), ens.dim())?;
    let results = prop.propagate_batch(ens.states());
    let mut states = Vec::with_capacity(results.len());
    let mut failed = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(s) => states.push(s),
            Err(_) => failed.push(i),
        }
    }
    if !failed.is_empty() {
        return Err(Error::PropagationFailures { indices: failed });
    }
    ens.with_states(states)
}

/// Monte Carlo: samples the initial deviation and propagates each sample.
///
/// Summarize with [`sample_mean_covariance`](super::sample_mean_covariance) (unbiased estimator).
pub fn mc_run(prop: &dyn Propagator, belief: &GaussianBelief, n: usize, seed: u64) -> Result<WeightedEnsemble> {
    let initial = sample_gaussian(belief, n, seed)?;
    propagate_ensemble(prop, &initial)
}

/// Linear covariance: mean `x_f + Φ μ₀`, covariance `Φ P₀ Φᵀ`.
pub fn lincov(final_reference: &[f64], stm: &Matrix, belief: &GaussianBelief) -> Result<CentralMomentSet> {
    check_len(stm.cols(), belief.dim())?;
    check_len(stm.rows(), final_reference.len())?;
    let shift = stm.mul_vec(belief.mean())?;
    let mean = final_reference.iter().zip(shift).map(|(x, d)| x + d).collect();
    let cov = stm.congruence(belief.covariance())?.symmetrized();
    Ok(CentralMomentSet::gaussian(mean, cov))
}

/// Unscented transform through `prop`; returns the propagated set (mean weights)
/// and its moments with the center covariance weight applied.
pub fn ut_run(
    prop: &dyn Propagator,
    belief: &GaussianBelief,
    params: &UtParams,
) -> Result<(WeightedEnsemble, CentralMomentSet)> {
    let out = propagate_ensemble(prop, &ut_points(belief, params)?)?;
    let mut moments = weighted_central_moments(&out, 2)?;
    let d: Vec<f64> = out.states()[0].iter().zip(&moments.mean).map(|(x, m)| x - m).collect();
    moments.cov = moments.cov.add(&Matrix::outer(&d, &d).scale(params.center_covariance_extra()))?.symmetrized();
    Ok((out, moments))
}

/// CUT4 through `prop` with moments up to `max_order`.
pub fn cut4_run(
    prop: &dyn Propagator,
    belief: &GaussianBelief,
    max_order: usize,
) -> Result<(WeightedEnsemble, CentralMomentSet)> {
    let out = propagate_ensemble(prop, &cut4_points(belief)?)?;
    let moments = weighted_central_moments(&out, max_order)?;
    Ok((out, moments))
}
