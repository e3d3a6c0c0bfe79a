#![allow(dead_code)]

use tuq_core::dynamics::{
    integrate, locate_apolune, southern_l2_halo, stm_propagate, AdaptiveSettings, Cr3bpSystem, System,
};
use tuq_core::flowmap::stretching_direction;
use tuq_core::Matrix;

pub struct Arc {
    pub sys: Cr3bpSystem,
    pub start: Vec<f64>,
    pub horizon: f64,
    pub stm: Matrix,
    pub gamma: Vec<f64>,
}

/// UQ arc of the halo study: 0.25 TU past apolune, 0.9 TU long.
pub fn halo_arc() -> Arc {
    let sys = Cr3bpSystem::earth_moon();
    let orbit = southern_l2_halo(&sys, 3.136654204).unwrap();
    let (t_apo, _) = locate_apolune(&sys, &orbit).unwrap();
    let start = integrate(&sys, &orbit.initial_state, 0.0, t_apo + 0.25, &AdaptiveSettings::default()).unwrap();
    let horizon = 0.9;
    let (_, stm) = stm_propagate(&sys, &start, 0.0, horizon, sys.default_fixed_step()).unwrap();
    let gamma = stretching_direction(&stm).unwrap();
    Arc { sys, start, horizon, stm, gamma }
}

/// `10⁻⁶ I + 10⁻⁵ γγᵀ`.
pub fn initial_covariance(gamma: &[f64]) -> Matrix {
    Matrix::identity(6).add(&Matrix::outer(gamma, gamma).scale(10.0)).unwrap().scale(1e-6)
}

pub const MEAN_DEVIATION: [f64; 6] = [0.0, 1e-4, 0.0, 0.0, 1e-4, 0.0];
