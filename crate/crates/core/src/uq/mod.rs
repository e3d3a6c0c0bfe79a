//! Uncertainty propagation: Monte Carlo, LinCov, UT, CUT4, PCE and GMM, all
//! driven through a [`Propagator`] that is either direct integration or a
//! precomputed flow map.
//!
//! Beliefs are expressed over the initial *deviation* from the propagator's
//! reference state; propagated ensembles and moments are over final states.

mod belief;
mod gmm;
mod methods;
mod moments;
mod pce;
mod propagator;
mod rng;
mod sigma;

pub use belief::GaussianBelief;
pub use gmm::{gmm_propagate, gmm_split, ComponentMethod, GaussianMixture};
pub use methods::{cut4_run, lincov, mc_run, propagate_ensemble, sample_gaussian, ut_run};
pub use moments::{sample_mean_covariance, weighted_central_moments, CentralMomentSet, SymmetricTensor, WeightedEnsemble};
pub use pce::{hermite, pce_fit, pce_moments, PceSurrogate, PCE_MOMENT_SAMPLES};
pub use propagator::{DirectPropagator, DirectScheme, LinearPropagator, MappedPropagator, Propagator};
pub use rng::{method_rng, MethodStream};
pub use sigma::{cut4_points, standard_cut4, ut_points, Cut4Constants, UtParams};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// `‖P_test − P_ref‖_F / ‖P_ref‖_F`.
pub fn covariance_error(p_test: &Matrix, p_ref: &Matrix) -> Result<f64> {
    let denom = p_ref.frobenius_norm();
    if denom == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok(p_test.sub(p_ref)?.frobenius_norm() / denom)
}

/// Euclidean norm of `a − b`.
pub fn mean_error(a: &[f64], b: &[f64]) -> Result<f64> {
    crate::error::check_len(a.len(), b.len())?;
    Ok(crate::linalg::norm(&a.iter().zip(b).map(|(x, y)| x - y).collect::<alloc::vec::Vec<_>>()))
}
