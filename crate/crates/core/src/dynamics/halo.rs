use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{collinear_point, integrate, integrate_dense, jacobi_constant, stm_propagate, AdaptiveSettings, Cr3bpSystem, System};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

const MAX_ITERATIONS: usize = 30;
const RESIDUAL_TOL: f64 = 1e-11;

/// A symmetric periodic orbit, started at its `y = 0` crossing.
#[derive(Clone, Debug, PartialEq)]
pub struct HaloOrbit {
    pub initial_state: Vec<f64>,
    pub period: f64,
    pub jacobi_constant: f64,
}

/// Third-order Richardson approximation of an L2 halo orbit.
///
/// `az` is the out-of-plane amplitude in nondimensional length. `class` = ±1 picks
/// the branch; the state is taken at the crossing nearest the Moon.
/// Returns the seed state and the approximate period.
pub fn richardson_seed(mu: f64, az: f64, class: f64) -> Result<(Vec<f64>, f64)> {
    let x_l2 = collinear_point(mu, 2)?;
    let gam = x_l2 - (1.0 - mu);
    let c = |n: i32| {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        (sign * mu + sign * (1.0 - mu) * gam.powi(n + 1) / (1.0 + gam).powi(n + 1)) / gam.powi(3)
    };
    let (c2, c3, c4) = (c(2), c(3), c(4));
    let lam = ((2.0 - c2 + ((c2 - 2.0).powi(2) + 4.0 * (c2 - 1.0) * (1.0 + 2.0 * c2)).sqrt()) / 2.0).sqrt();
    let k = (lam * lam + 1.0 + 2.0 * c2) / (2.0 * lam);
    let dl = lam * lam - c2;
    let d1 = 3.0 * lam * lam / k * (k * (6.0 * lam * lam - 1.0) - 2.0 * lam);
    let d2 = 8.0 * lam * lam / k * (k * (11.0 * lam * lam - 1.0) - 2.0 * lam);
    let a21 = 3.0 * c3 * (k * k - 2.0) / (4.0 * (1.0 + 2.0 * c2));
    let a22 = 3.0 * c3 / (4.0 * (1.0 + 2.0 * c2));
    let a23 = -3.0 * c3 * lam / (4.0 * k * d1) * (3.0 * k.powi(3) * lam - 6.0 * k * (k - lam) + 4.0);
    let a24 = -3.0 * c3 * lam / (4.0 * k * d1) * (2.0 + 3.0 * k * lam);
    let b21 = -3.0 * c3 * lam / (2.0 * d1) * (3.0 * k * lam - 4.0);
    let b22 = 3.0 * c3 * lam / d1;
    let d21 = -c3 / (2.0 * lam * lam);
    let a31 = -9.0 * lam / (4.0 * d2) * (4.0 * c3 * (k * a23 - b21) + k * c4 * (4.0 + k * k))
        + (9.0 * lam * lam + 1.0 - c2) / (2.0 * d2) * (3.0 * c3 * (2.0 * a23 - k * b21) + c4 * (2.0 + 3.0 * k * k));
    let a32 = -1.0 / d2
        * (9.0 * lam / 4.0 * (4.0 * c3 * (k * a24 - b22) + k * c4)
            + 1.5 * (9.0 * lam * lam + 1.0 - c2) * (c3 * (k * b22 + d21 - 2.0 * a24) - c4));
    let b31 = 3.0 / (8.0 * d2)
        * (8.0 * lam * (3.0 * c3 * (k * b21 - 2.0 * a23) - c4 * (2.0 + 3.0 * k * k))
            + (9.0 * lam * lam + 1.0 + 2.0 * c2) * (4.0 * c3 * (k * a23 - b21) + k * c4 * (4.0 + k * k)));
    let b32 = 1.0 / d2
        * (9.0 * lam * (c3 * (k * b22 + d21 - 2.0 * a24) - c4)
            + 3.0 / 8.0 * (9.0 * lam * lam + 1.0 + 2.0 * c2) * (4.0 * c3 * (k * a24 - b22) + k * c4));
    let d31 = 3.0 / (64.0 * lam * lam) * (4.0 * c3 * a24 + c4);
    let d32 = 3.0 / (64.0 * lam * lam) * (4.0 * c3 * (a23 - d21) + c4 * (4.0 + k * k));
    let den = 2.0 * lam * (lam * (1.0 + k * k) - 2.0 * k);
    let s1 = (1.5 * c3 * (2.0 * a21 * (k * k - 2.0) - a23 * (k * k + 2.0) - 2.0 * k * b21)
        - 3.0 / 8.0 * c4 * (3.0 * k.powi(4) - 8.0 * k * k + 8.0))
        / den;
    let s2 = (1.5 * c3 * (2.0 * a22 * (k * k - 2.0) + a24 * (k * k + 2.0) + 2.0 * k * b22 + 5.0 * d21)
        + 3.0 / 8.0 * c4 * (12.0 - k * k))
        / den;
    let a1 = -1.5 * c3 * (2.0 * a21 + a23 + 5.0 * d21) - 3.0 / 8.0 * c4 * (12.0 - k * k);
    let a2 = 1.5 * c3 * (a24 - 2.0 * a22) + 9.0 / 8.0 * c4;
    let l1 = a1 + 2.0 * lam * lam * s1;
    let l2 = a2 + 2.0 * lam * lam * s2;

    let az = az / gam;
    let ax_sq = (-l2 * az * az - dl) / l1;
    if !(ax_sq > 0.0) {
        return Err(Error::Construction("amplitude below the halo bifurcation".into()));
    }
    let ax = ax_sq.sqrt();
    let omega = 1.0 + s1 * ax * ax + s2 * az * az;
    // Phase zero: the crossing on the Moon side.
    let x = a21 * ax * ax + a22 * az * az - ax + (a23 * ax * ax - a24 * az * az) + (a31 * ax.powi(3) - a32 * ax * az * az);
    let z = class * az - 2.0 * class * d21 * ax * az + class * (d32 * az * ax * ax - d31 * az.powi(3));
    let ydot = lam
        * omega
        * (k * ax + 2.0 * (b21 * ax * ax - b22 * az * az) + 3.0 * (b31 * ax.powi(3) - b32 * ax * az * az));
    let state = vec![x_l2 + gam * x, 0.0, gam * z, 0.0, gam * ydot, 0.0];
    Ok((state, 2.0 * core::f64::consts::PI / (lam * omega)))
}

/// Differential correction of a symmetric orbit holding `z₀` fixed.
///
/// Adjusts `x₀` and `ẏ₀` until the next `y = 0` crossing is perpendicular
/// (`ẋ = ż = 0`); the period is twice the crossing time.
pub fn halo_correct(sys: &Cr3bpSystem, guess: &[f64], period_guess: f64) -> Result<HaloOrbit> {
    let settings = AdaptiveSettings::default();
    let mut x = guess.to_vec();
    if x.len() != 6 {
        return Err(Error::DimensionMismatch { expected: 6, got: x.len() });
    }
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        let (t_half, s) = half_period_crossing(sys, &x, period_guess, &settings)?;
        residual = s[3].abs().max(s[5].abs());
        if residual < RESIDUAL_TOL {
            return finish(sys, x, 2.0 * t_half);
        }
        let (_, phi) = stm_propagate(sys, &x, 0.0, t_half, sys.default_fixed_step())?;
        let ds = sys.rhs(0.0, &s)?;
        let col = |row: usize, j: usize| phi[(row, j)] - ds[row] * phi[(1, j)] / ds[1];
        let a = Matrix::from_rows(&[&[col(3, 0), col(3, 4)], &[col(5, 0), col(5, 4)]]);
        let dx = solve2(&a, [-s[3], -s[5]])?;
        x[0] += dx[0];
        x[4] += dx[1];
    }
    Err(Error::CorrectorFailure { iterations: MAX_ITERATIONS, residual })
}

/// Newton correction at fixed period: adjusts `(x₀, z₀, ẏ₀)` so that the state at
/// `T/2` satisfies `y = ẋ = ż = 0`.
pub fn halo_correct_fixed_period(sys: &Cr3bpSystem, guess: &[f64], period: f64) -> Result<HaloOrbit> {
    let settings = AdaptiveSettings::default();
    let mut x = guess.to_vec();
    if x.len() != 6 {
        return Err(Error::DimensionMismatch { expected: 6, got: x.len() });
    }
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        let s = integrate(sys, &x, 0.0, 0.5 * period, &settings)?;
        let r = [s[1], s[3], s[5]];
        residual = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if residual < RESIDUAL_TOL {
            return finish(sys, x, period);
        }
        let (_, phi) = stm_propagate(sys, &x, 0.0, 0.5 * period, sys.default_fixed_step())?;
        let rows = [1, 3, 5];
        let cols = [0, 2, 4];
        let j = Matrix::from_fn(3, 3, |a, b| phi[(rows[a], cols[b])]);
        let rhs = Matrix::from_row_slice(3, 1, &[-r[0], -r[1], -r[2]]);
        let dx = solve_square(&j, &rhs)?;
        for (k, &c) in cols.iter().enumerate() {
            x[c] += dx[k];
        }
    }
    Err(Error::CorrectorFailure { iterations: MAX_ITERATIONS, residual })
}

fn finish(sys: &Cr3bpSystem, initial_state: Vec<f64>, period: f64) -> Result<HaloOrbit> {
    let jacobi_constant = jacobi_constant(&initial_state, sys.mu())?;
    Ok(HaloOrbit { initial_state, period, jacobi_constant })
}

fn half_period_crossing(
    sys: &Cr3bpSystem,
    x0: &[f64],
    period_guess: f64,
    settings: &AdaptiveSettings,
) -> Result<(f64, Vec<f64>)> {
    let sol = integrate_dense(sys, x0, 0.0, 0.75 * period_guess, settings)?;
    let direction = if x0[4] > 0.0 { -1 } else { 1 };
    let (t, _) = sol
        .crossings(|_, s| s[1], direction, 1e-3 * period_guess, 1e-14)
        .into_iter()
        .next()
        .ok_or_else(|| Error::Construction("orbit guess never returns to y = 0".into()))?;
    // Re-integrate to the crossing so the residual is free of interpolation error.
    Ok((t, integrate(sys, x0, 0.0, t, settings)?))
}

fn solve2(a: &Matrix, b: [f64; 2]) -> Result<[f64; 2]> {
    let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
    if det == 0.0 || !det.is_finite() {
        return Err(Error::Singular("corrector Jacobian"));
    }
    Ok([
        (b[0] * a[(1, 1)] - a[(0, 1)] * b[1]) / det,
        (a[(0, 0)] * b[1] - a[(1, 0)] * b[0]) / det,
    ])
}

fn solve_square(a: &Matrix, b: &Matrix) -> Result<Vec<f64>> {
    a.least_squares(b).map(|m| m.column(0)).map_err(|_| Error::Singular("corrector Jacobian"))
}

/// Southern L2 halo orbit with the requested period.
///
/// Starts from a small Richardson orbit, continues in `z₀` with the fixed-`z₀`
/// corrector while the period is long, then continues in period with the
/// fixed-period corrector down to `target_period`. The returned orbit starts at
/// the Moon-side crossing with `z₀ > 0`, so its far (apolune) side lies below the
/// plane.
pub fn southern_l2_halo(sys: &Cr3bpSystem, target_period: f64) -> Result<HaloOrbit> {
    const SEED_AMPLITUDE: f64 = 0.01;
    const SWITCH_PERIOD: f64 = 3.30;
    const DZ: f64 = 0.002;
    const DT: f64 = 0.01;

    let (seed, t_seed) = richardson_seed(sys.mu(), SEED_AMPLITUDE, 1.0)?;
    let mut orbit = halo_correct(sys, &seed, t_seed)?;
    if target_period >= orbit.period {
        return Err(Error::Construction("target period is outside the continued family".into()));
    }
    while orbit.period > SWITCH_PERIOD.max(target_period) {
        let mut next = orbit.initial_state.clone();
        next[2] += DZ;
        orbit = halo_correct(sys, &next, orbit.period)?;
    }
    while orbit.period - target_period > 1e-12 {
        let period = (orbit.period - DT).max(target_period);
        orbit = halo_correct_fixed_period(sys, &orbit.initial_state, period)?;
    }
    Ok(orbit)
}

/// Time after the orbit start and state at the maximum distance from the Moon.
pub fn locate_apolune(sys: &Cr3bpSystem, orbit: &HaloOrbit) -> Result<(f64, Vec<f64>)> {
    let settings = AdaptiveSettings::default();
    let sol = integrate_dense(sys, &orbit.initial_state, 0.0, orbit.period, &settings)?;
    let moon = 1.0 - sys.mu();
    // d/dt ½|r − r_M|² = (r − r_M)·v, falling through zero at a maximum.
    let radial_rate = |_: f64, s: &[f64]| (s[0] - moon) * s[3] + s[1] * s[4] + s[2] * s[5];
    let dist = |s: &[f64]| ((s[0] - moon).powi(2) + s[1] * s[1] + s[2] * s[2]).sqrt();
    sol.crossings(radial_rate, -1, 0.0, 1e-12)
        .into_iter()
        .max_by(|a, b| dist(&a.1).total_cmp(&dist(&b.1)))
        .ok_or_else(|| Error::Construction("no distance maximum on the orbit".into()))
}
