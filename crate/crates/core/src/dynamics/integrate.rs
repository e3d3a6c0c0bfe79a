use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{System, Trajectory};
use crate::algebra::Algebra;
use crate::error::{check_len, Error, Result};
use crate::linalg::Matrix;
use crate::poly::PolyContext;

/// Tolerances for the adaptive Dormand–Prince 5(4) integrator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveSettings {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on |h|; `None` leaves the step unbounded.
    pub max_step: Option<f64>,
}

impl Default for AdaptiveSettings {
    fn default() -> Self {
        AdaptiveSettings { rtol: 1e-12, atol: 1e-12, max_steps: 1_000_000, max_step: None }
    }
}

impl AdaptiveSettings {
    fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol >= 0.0) || self.max_steps == 0 {
            return Err(Error::invalid("adaptive tolerances must be positive"));
        }
        if matches!(self.max_step, Some(h) if !(h > 0.0)) {
            return Err(Error::invalid("maximum step must be positive"));
        }
        Ok(())
    }
}

/// Fixed-step classical RK4, specified as steps per unit of time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedStep {
    pub steps_per_unit: f64,
}

impl FixedStep {
    pub fn per_unit(steps_per_unit: f64) -> Self {
        FixedStep { steps_per_unit }
    }

    pub fn step_size(h: f64) -> Self {
        FixedStep { steps_per_unit: 1.0 / h }
    }

    /// Number of steps used to cover `span`; at least one.
    pub fn steps_for(&self, span: f64) -> usize {
        let n = (span.abs() * self.steps_per_unit - 1e-9).ceil();
        if n < 1.0 {
            1
        } else {
            n as usize
        }
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// Hairer's continuous extension of order 4.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

#[derive(Clone, Debug)]
struct DenseStep {
    t: f64,
    h: f64,
    rcont: [Vec<f64>; 5],
}

impl DenseStep {
    fn eval(&self, t: f64) -> Vec<f64> {
        let theta = (t - self.t) / self.h;
        let theta1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = &self.rcont;
        (0..r1.len())
            .map(|i| r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i]))))
            .collect()
    }
}

/// Continuous solution of an adaptive integration.
#[derive(Clone, Debug)]
pub struct DenseSolution {
    system: &'static str,
    t0: f64,
    tf: f64,
    x0: Vec<f64>,
    xf: Vec<f64>,
    steps: Vec<DenseStep>,
}

impl DenseSolution {
    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn tf(&self) -> f64 {
        self.tf
    }

    pub fn final_state(&self) -> &[f64] {
        &self.xf
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// Mesh of accepted step boundaries.
    pub fn mesh(&self) -> Vec<f64> {
        let mut m: Vec<f64> = self.steps.iter().map(|s| s.t).collect();
        m.push(self.tf);
        m
    }

    fn forward(&self) -> bool {
        self.tf >= self.t0
    }

    /// Interpolated state at `t` inside the integration interval.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let (lo, hi) = if self.forward() { (self.t0, self.tf) } else { (self.tf, self.t0) };
        if !(t >= lo && t <= hi) {
            return Err(Error::invalid("dense output requested outside the integration interval"));
        }
        if t == self.t0 {
            return Ok(self.x0.clone());
        }
        if t == self.tf {
            return Ok(self.xf.clone());
        }
        let fwd = self.forward();
        // First step whose end lies beyond t.
        let idx = self.steps.partition_point(|s| if fwd { s.t + s.h < t } else { s.t + s.h > t });
        let step = &self.steps[idx.min(self.steps.len() - 1)];
        Ok(step.eval(t))
    }

    /// States at the requested increasing times.
    pub fn sample(&self, times: &[f64]) -> Result<Trajectory> {
        let states = times.iter().map(|&t| self.eval(t)).collect::<Result<Vec<_>>>()?;
        Trajectory::new(self.system, times.to_vec(), states)
    }

    /// `n` evenly spaced samples including both ends (forward solutions only).
    pub fn uniform_trajectory(&self, n: usize) -> Result<Trajectory> {
        if n < 2 || !self.forward() {
            return Err(Error::invalid("uniform sampling needs n ≥ 2 on a forward solution"));
        }
        let times: Vec<f64> = (0..n)
            .map(|i| if i + 1 == n { self.tf } else { self.t0 + (self.tf - self.t0) * i as f64 / (n - 1) as f64 })
            .collect();
        self.sample(&times)
    }

    /// Roots of `g(t, x)` strictly after `t_after`, located by bisection on the dense
    /// output to within `tol` in time.
    ///
    /// `direction` > 0 keeps rising crossings, < 0 falling ones, 0 both.
    pub fn crossings(
        &self,
        g: impl Fn(f64, &[f64]) -> f64,
        direction: i8,
        t_after: f64,
        tol: f64,
    ) -> Vec<(f64, Vec<f64>)> {
        const SUBDIVISIONS: usize = 4;
        let fwd = self.forward();
        let beyond = |t: f64| if fwd { t > t_after } else { t < t_after };
        let mut found = Vec::new();
        for step in &self.steps {
            let mut ta = step.t;
            let mut ga = g(ta, &step.eval(ta));
            for k in 1..=SUBDIVISIONS {
                let tb = step.t + step.h * k as f64 / SUBDIVISIONS as f64;
                let gb = g(tb, &step.eval(tb));
                let rising = ga < 0.0 && gb >= 0.0;
                let falling = ga > 0.0 && gb <= 0.0;
                let wanted = (direction >= 0 && rising) || (direction <= 0 && falling);
                if wanted && beyond(tb) {
                    let (mut lo, mut hi, mut glo) = (ta, tb, ga);
                    while (hi - lo).abs() > tol {
                        let mid = 0.5 * (lo + hi);
                        let gm = g(mid, &step.eval(mid));
                        if (gm < 0.0) == (glo < 0.0) && gm != 0.0 {
                            lo = mid;
                            glo = gm;
                        } else {
                            hi = mid;
                        }
                    }
                    let t = 0.5 * (lo + hi);
                    if beyond(t) {
                        found.push((t, step.eval(t)));
                    }
                }
                ta = tb;
                ga = gb;
            }
        }
        found
    }
}

fn error_norm(err: &[f64], y0: &[f64], y1: &[f64], s: &AdaptiveSettings) -> f64 {
    let sum: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = s.atol + s.rtol * a.abs().max(b.abs());
            (e / sc) * (e / sc)
        })
        .sum();
    (sum / err.len() as f64).sqrt()
}

fn eval_rhs<S: System>(sys: &S, t: f64, x: &[f64]) -> Result<Vec<f64>> {
    let f = sys.rhs(t, x)?;
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::Integration { t, reason: "non-finite derivative" });
    }
    Ok(f)
}

fn initial_step<S: System>(sys: &S, t0: f64, x0: &[f64], f0: &[f64], dir: f64, s: &AdaptiveSettings) -> Result<f64> {
    let n = x0.len() as f64;
    let scale: Vec<f64> = x0.iter().map(|x| s.atol + s.rtol * x.abs()).collect();
    let rms = |v: &[f64]| (v.iter().zip(&scale).map(|(a, sc)| (a / sc) * (a / sc)).sum::<f64>() / n).sqrt();
    let d0 = rms(x0);
    let d1 = rms(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let x1: Vec<f64> = x0.iter().zip(f0).map(|(x, f)| x + dir * h0 * f).collect();
    let f1 = eval_rhs(sys, t0 + dir * h0, &x1)?;
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    Ok((100.0 * h0).min(h1))
}

/// Adaptive Dormand–Prince 5(4) integration with dense output.
pub fn integrate_dense<S: System>(
    sys: &S,
    x0: &[f64],
    t0: f64,
    tf: f64,
    settings: &AdaptiveSettings,
) -> Result<DenseSolution> {
    check_len(sys.dim(), x0.len())?;
    settings.validate()?;
    if !(t0.is_finite() && tf.is_finite()) {
        return Err(Error::invalid("integration bounds must be finite"));
    }
    let mut sol =
        DenseSolution { system: sys.name(), t0, tf, x0: x0.to_vec(), xf: x0.to_vec(), steps: Vec::new() };
    if tf == t0 {
        return Ok(sol);
    }
    let n = x0.len();
    let dir = if tf > t0 { 1.0 } else { -1.0 };
    let span = (tf - t0).abs();
    let max_step = settings.max_step.unwrap_or(span).min(span);

    let mut t = t0;
    let mut y = x0.to_vec();
    let mut k: [Vec<f64>; 7] = core::array::from_fn(|_| vec![0.0; n]);
    k[0] = eval_rhs(sys, t, &y)?;
    let mut h = initial_step(sys, t0, &y, &k[0], dir, settings)?.min(max_step);
    let mut stage = vec![0.0; n];
    let mut accepted = 0usize;
    let mut rejected_last = false;

    while (tf - t) * dir > 0.0 {
        if accepted + 1 > settings.max_steps {
            return Err(Error::Integration { t, reason: "maximum number of steps exceeded" });
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Integration { t, reason: "step size underflow" });
        }
        let last = (t + dir * h - tf) * dir >= 0.0;
        let hs = if last { tf - t } else { dir * h };

        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                stage[i] = y[i] + hs * acc;
            }
            k[s] = eval_rhs(sys, t + C[s] * hs, &stage)?;
        }
        // Stage 7 is evaluated at the 5th-order solution (FSAL).
        let y_new = stage.clone();
        let err: Vec<f64> = (0..n).map(|i| hs * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>()).collect();
        let en = error_norm(&err, &y, &y_new, settings);
        if !en.is_finite() {
            return Err(Error::Integration { t, reason: "non-finite error estimate" });
        }

        if en <= 1.0 {
            let ydiff: Vec<f64> = (0..n).map(|i| y_new[i] - y[i]).collect();
            let bspl: Vec<f64> = (0..n).map(|i| hs * k[0][i] - ydiff[i]).collect();
            let r4: Vec<f64> = (0..n).map(|i| ydiff[i] - hs * k[6][i] - bspl[i]).collect();
            let r5: Vec<f64> = (0..n).map(|i| hs * (0..7).map(|j| D[j] * k[j][i]).sum::<f64>()).collect();
            sol.steps.push(DenseStep { t, h: hs, rcont: [y.clone(), ydiff, bspl, r4, r5] });
            accepted += 1;
            t = if last { tf } else { t + hs };
            y = y_new;
            k[0] = k[6].clone();
            let mut fac = 0.9 * en.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 10.0);
            if rejected_last {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(max_step);
            rejected_last = false;
        } else {
            let fac = (0.9 * en.powf(-0.2)).max(0.2);
            h *= fac;
            rejected_last = true;
        }
    }
    sol.xf = y;
    Ok(sol)
}

/// Final state of an adaptive integration.
pub fn integrate<S: System>(
    sys: &S,
    x0: &[f64],
    t0: f64,
    tf: f64,
    settings: &AdaptiveSettings,
) -> Result<Vec<f64>> {
    Ok(integrate_dense(sys, x0, t0, tf, settings)?.xf)
}

/// Fixed-step classical RK4 over any algebra.
pub fn integrate_fixed<S: System, T: Algebra>(
    sys: &S,
    x0: Vec<T>,
    t0: f64,
    tf: f64,
    step: FixedStep,
) -> Result<Vec<T>> {
    check_len(sys.dim(), x0.len())?;
    if !(step.steps_per_unit > 0.0 && step.steps_per_unit.is_finite()) {
        return Err(Error::invalid("fixed step count must be positive"));
    }
    if tf == t0 {
        return Ok(x0);
    }
    let n = step.steps_for(tf - t0);
    let h = (tf - t0) / n as f64;
    let mut y = x0;
    for i in 0..n {
        let t = t0 + i as f64 * h;
        let k1 = sys.rhs(t, &y)?;
        let y2: Vec<T> = y.iter().zip(&k1).map(|(a, k)| a.plus_scaled(0.5 * h, k)).collect();
        let k2 = sys.rhs(t + 0.5 * h, &y2)?;
        let y3: Vec<T> = y.iter().zip(&k2).map(|(a, k)| a.plus_scaled(0.5 * h, k)).collect();
        let k3 = sys.rhs(t + 0.5 * h, &y3)?;
        let y4: Vec<T> = y.iter().zip(&k3).map(|(a, k)| a.plus_scaled(h, k)).collect();
        let k4 = sys.rhs(t + h, &y4)?;
        y = y
            .iter()
            .enumerate()
            .map(|(j, a)| {
                let incr = k1[j].plus(&k4[j]).plus_scaled(2.0, &k2[j].plus(&k3[j]));
                a.plus_scaled(h / 6.0, &incr)
            })
            .collect();
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integration { t: t + h, reason: "non-finite state" });
        }
    }
    Ok(y)
}

/// Final reference state and `Φ(tf, t0)`, read off the linear part of an order-1
/// polynomial propagation.
pub fn stm_propagate<S: System>(
    sys: &S,
    x_r: &[f64],
    t0: f64,
    tf: f64,
    step: FixedStep,
) -> Result<(Vec<f64>, Matrix)> {
    let n = sys.dim();
    check_len(n, x_r.len())?;
    let ctx = PolyContext::new(n, 1)?;
    let x0 = x_r
        .iter()
        .enumerate()
        .map(|(i, &v)| ctx.shifted_variable(i, v))
        .collect::<Result<Vec<_>>>()?;
    let xf = integrate_fixed(sys, x0, t0, tf, step)?;
    let mut phi = Matrix::zeros(n, n);
    for (i, p) in xf.iter().enumerate() {
        for (j, v) in p.linear_part().into_iter().enumerate() {
            phi[(i, j)] = v;
        }
    }
    Ok((xf.iter().map(|p| p.constant_part()).collect(), phi))
}
