use alloc::vec;
use alloc::vec::Vec;

use crate::dynamics::{integrate, integrate_fixed, stm_propagate, AdaptiveSettings, FixedStep, System};
use crate::error::{check_len, Result};
use crate::flowmap::{EvalWorkspace, PolyFlowMap};
use crate::linalg::Matrix;

/// Maps an initial deviation from a fixed reference state to a final state.
pub trait Propagator {
    fn dim(&self) -> usize;

    fn propagate(&self, deviation: &[f64]) -> Result<Vec<f64>>;

    /// Final reference state and the Jacobian of the flow at zero deviation.
    fn linearize(&self) -> Result<(Vec<f64>, Matrix)>;

    /// Final state and flow Jacobian at the given initial deviation.
    fn linearize_at(&self, deviation: &[f64]) -> Result<(Vec<f64>, Matrix)>;

    /// Propagates deviations in order; failures are reported per item.
    fn propagate_batch(&self, deviations: &[Vec<f64>]) -> Vec<Result<Vec<f64>>> {
        deviations.iter().map(|d| self.propagate(d)).collect()
    }
}

/// Which scalar integrator a [`DirectPropagator`] uses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DirectScheme {
    Adaptive(AdaptiveSettings),
    Rk4(FixedStep),
}

/// Numerical integration of every sample.
#[derive(Clone, Debug)]
pub struct DirectPropagator<S> {
    system: S,
    reference: Vec<f64>,
    t0: f64,
    tf: f64,
    scheme: DirectScheme,
    stm_step: FixedStep,
}

impl<S: System> DirectPropagator<S> {
    /// Adaptive Dormand–Prince with default tolerances; the linearization uses the
    /// system's default polynomial step.
    pub fn new(system: S, reference: Vec<f64>, t0: f64, tf: f64) -> Result<Self> {
        check_len(system.dim(), reference.len())?;
        let stm_step = system.default_fixed_step();
        Ok(DirectPropagator {
            system,
            reference,
            t0,
            tf,
            scheme: DirectScheme::Adaptive(AdaptiveSettings::default()),
            stm_step,
        })
    }

    pub fn with_scheme(mut self, scheme: DirectScheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn system(&self) -> &S {
        &self.system
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    pub fn span(&self) -> (f64, f64) {
        (self.t0, self.tf)
    }
}

impl<S: System> Propagator for DirectPropagator<S> {
    fn dim(&self) -> usize {
        self.reference.len()
    }

    fn propagate(&self, deviation: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), deviation.len())?;
        let x0: Vec<f64> = self.reference.iter().zip(deviation).map(|(r, d)| r + d).collect();
        match self.scheme {
            DirectScheme::Adaptive(s) => integrate(&self.system, &x0, self.t0, self.tf, &s),
            DirectScheme::Rk4(step) => integrate_fixed(&self.system, x0, self.t0, self.tf, step),
        }
    }

    fn linearize(&self) -> Result<(Vec<f64>, Matrix)> {
        stm_propagate(&self.system, &self.reference, self.t0, self.tf, self.stm_step)
    }

    fn linearize_at(&self, deviation: &[f64]) -> Result<(Vec<f64>, Matrix)> {
        check_len(self.dim(), deviation.len())?;
        let x0: Vec<f64> = self.reference.iter().zip(deviation).map(|(r, d)| r + d).collect();
        stm_propagate(&self.system, &x0, self.t0, self.tf, self.stm_step)
    }
}

/// Evaluation of a precomputed flow map.
#[derive(Clone, Debug)]
pub struct MappedPropagator<'a> {
    map: &'a PolyFlowMap,
}

impl<'a> MappedPropagator<'a> {
    pub fn new(map: &'a PolyFlowMap) -> Self {
        MappedPropagator { map }
    }

    pub fn map(&self) -> &PolyFlowMap {
        self.map
    }
}

impl Propagator for MappedPropagator<'_> {
    fn dim(&self) -> usize {
        self.map.dim()
    }

    fn propagate(&self, deviation: &[f64]) -> Result<Vec<f64>> {
        self.map.eval(deviation)
    }

    fn linearize(&self) -> Result<(Vec<f64>, Matrix)> {
        Ok((self.map.final_state(), self.map.stm()))
    }

    fn linearize_at(&self, deviation: &[f64]) -> Result<(Vec<f64>, Matrix)> {
        Ok((self.map.eval(deviation)?, self.map.jacobian(deviation)?))
    }

    fn propagate_batch(&self, deviations: &[Vec<f64>]) -> Vec<Result<Vec<f64>>> {
        let mut ws = EvalWorkspace::new(self.map);
        deviations
            .iter()
            .map(|d| {
                let mut out = vec![0.0; self.map.dim()];
                self.map.eval_into(d, &mut ws, &mut out).map(|_| out)
            })
            .collect()
    }
}

/// Affine flow `x_f + A δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearPropagator {
    pub final_reference: Vec<f64>,
    pub matrix: Matrix,
}

impl LinearPropagator {
    pub fn new(final_reference: Vec<f64>, matrix: Matrix) -> Result<Self> {
        check_len(matrix.rows(), final_reference.len())?;
        Ok(LinearPropagator { final_reference, matrix })
    }

    pub fn identity(n: usize) -> Self {
        LinearPropagator { final_reference: vec![0.0; n], matrix: Matrix::identity(n) }
    }
}

impl Propagator for LinearPropagator {
    fn dim(&self) -> usize {
        self.matrix.cols()
    }

    fn propagate(&self, deviation: &[f64]) -> Result<Vec<f64>> {
        let ad = self.matrix.mul_vec(deviation)?;
        Ok(self.final_reference.iter().zip(ad).map(|(r, d)| r + d).collect())
    }

    fn linearize(&self) -> Result<(Vec<f64>, Matrix)> {
        Ok((self.final_reference.clone(), self.matrix.clone()))
    }

    fn linearize_at(&self, deviation: &[f64]) -> Result<(Vec<f64>, Matrix)> {
        Ok((self.propagate(deviation)?, self.matrix.clone()))
    }
}
