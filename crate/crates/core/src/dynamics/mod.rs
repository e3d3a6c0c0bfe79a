//! Dynamical models, integrators and nominal-trajectory construction.

mod aerocapture;
mod cr3bp;
mod halo;
mod integrate;

use alloc::vec::Vec;

pub use aerocapture::{
    build_aerocapture_nominal, AerocaptureNominal, AerocaptureSystem, OrbitElements, KeplerSystem,
};
pub use cr3bp::{collinear_point, jacobi_constant, Cr3bpSystem, EARTH_MOON_MU};
pub use halo::{
    halo_correct, halo_correct_fixed_period, locate_apolune, richardson_seed, southern_l2_halo, HaloOrbit,
};
pub use integrate::{
    integrate, integrate_dense, integrate_fixed, stm_propagate, AdaptiveSettings, DenseSolution, FixedStep,
};

use crate::algebra::Algebra;
use crate::error::{check_len, Error, Result};

/// An autonomous or time-dependent vector field written over any [`Algebra`].
pub trait System {
    fn dim(&self) -> usize;

    fn name(&self) -> &'static str;

    fn rhs<T: Algebra>(&self, t: f64, x: &[T]) -> Result<Vec<T>>;

    /// Default fixed step for polynomial propagation.
    fn default_fixed_step(&self) -> FixedStep;
}

/// Sampled states along a propagation.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    system: &'static str,
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn new(system: &'static str, times: Vec<f64>, states: Vec<Vec<f64>>) -> Result<Self> {
        check_len(times.len(), states.len())?;
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("trajectory times must be strictly increasing"));
        }
        if let Some(first) = states.first() {
            if states.iter().any(|s| s.len() != first.len()) {
                return Err(Error::invalid("trajectory states differ in dimension"));
            }
        }
        Ok(Trajectory { system, times, states })
    }

    pub fn system(&self) -> &'static str {
        self.system
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}
