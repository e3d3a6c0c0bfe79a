use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{FixedStep, System};
use crate::algebra::Algebra;
use crate::error::{check_len, Error, Result};

/// Earth–Moon mass ratio.
pub const EARTH_MOON_MU: f64 = 0.0121505856;

/// Circular restricted three-body problem in the rotating, nondimensional frame.
///
/// State: `(x, y, z, ẋ, ẏ, ż)`; the larger primary sits at `(−μ, 0, 0)` and the
/// smaller at `(1 − μ, 0, 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cr3bpSystem {
    mu: f64,
}

impl Cr3bpSystem {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu < 0.5) {
            return Err(Error::invalid("mass ratio must lie in (0, 0.5)"));
        }
        Ok(Cr3bpSystem { mu })
    }

    pub fn earth_moon() -> Self {
        Cr3bpSystem { mu: EARTH_MOON_MU }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

impl Default for Cr3bpSystem {
    fn default() -> Self {
        Self::earth_moon()
    }
}

impl System for Cr3bpSystem {
    fn dim(&self) -> usize {
        6
    }

    fn name(&self) -> &'static str {
        "cr3bp"
    }

    fn rhs<T: Algebra>(&self, _t: f64, s: &[T]) -> Result<Vec<T>> {
        check_len(6, s.len())?;
        let mu = self.mu;
        let (x, y, z) = (&s[0], &s[1], &s[2]);
        let (vx, vy, vz) = (&s[3], &s[4], &s[5]);
        let d1x = x.shift(mu);
        let d2x = x.shift(mu - 1.0);
        let yz = y.square().plus(&z.square());
        let r1sq = d1x.square().plus(&yz);
        let r2sq = d2x.square().plus(&yz);
        if !(r1sq.constant_part() > 0.0 && r2sq.constant_part() > 0.0) {
            return Err(Error::Singular("position coincides with a primary"));
        }
        let inv1 = r1sq.try_inv_sqrt()?;
        let inv2 = r2sq.try_inv_sqrt()?;
        // (1 − μ)/r₁³ and μ/r₂³
        let g1 = inv1.square().times(&inv1).scale(1.0 - mu);
        let g2 = inv2.square().times(&inv2).scale(mu);
        let g = g1.plus(&g2);

        let ax = vy.scale(2.0).plus(x).minus(&g1.times(&d1x)).minus(&g2.times(&d2x));
        let ay = vx.scale(-2.0).plus(y).minus(&g.times(y));
        let az = g.times(z).scale(-1.0);
        Ok(vec![vx.clone(), vy.clone(), vz.clone(), ax, ay, az])
    }

    fn default_fixed_step(&self) -> FixedStep {
        FixedStep::per_unit(2000.0)
    }
}

/// `C_J = 2U − v²` with `U = (x² + y²)/2 + (1 − μ)/r₁ + μ/r₂`.
pub fn jacobi_constant(state: &[f64], mu: f64) -> Result<f64> {
    check_len(6, state.len())?;
    let (x, y, z) = (state[0], state[1], state[2]);
    let r1 = ((x + mu).powi(2) + y * y + z * z).sqrt();
    let r2 = ((x - 1.0 + mu).powi(2) + y * y + z * z).sqrt();
    if r1 == 0.0 || r2 == 0.0 {
        return Err(Error::Singular("position coincides with a primary"));
    }
    let v2 = state[3] * state[3] + state[4] * state[4] + state[5] * state[5];
    Ok(x * x + y * y + 2.0 * (1.0 - mu) / r1 + 2.0 * mu / r2 - v2)
}

/// x-coordinate of the collinear libration point `L1`, `L2` or `L3` (`which` = 1, 2, 3).
pub fn collinear_point(mu: f64, which: u8) -> Result<f64> {
    // ∂U/∂x on the x-axis.
    let dudx = |x: f64| {
        let a = x + mu;
        let b = x - 1.0 + mu;
        x - (1.0 - mu) * a / a.abs().powi(3) - mu * b / b.abs().powi(3)
    };
    let eps = 1e-9;
    let (lo, hi) = match which {
        1 => (-mu + eps, 1.0 - mu - eps),
        2 => (1.0 - mu + eps, 2.0),
        3 => (-2.0, -mu - eps),
        _ => return Err(Error::invalid("collinear point index must be 1, 2 or 3")),
    };
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = dudx(lo);
    if flo * dudx(hi) > 0.0 {
        return Err(Error::Construction("collinear point is not bracketed".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = dudx(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::PolyContext;

    #[test]
    fn libration_points_are_equilibria() {
        let sys = Cr3bpSystem::earth_moon();
        for which in 1..=3 {
            let x = collinear_point(sys.mu(), which).unwrap();
            let f = sys.rhs(0.0, &[x, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
            for v in f {
                assert!(v.abs() < 1e-13, "L{which}: {v}");
            }
        }
    }

    #[test]
    fn planar_state_stays_planar() {
        let sys = Cr3bpSystem::earth_moon();
        let f = sys.rhs(0.0, &[0.8, 0.1, 0.0, 0.05, 0.2, 0.0]).unwrap();
        assert_eq!(f[2], 0.0);
        assert_eq!(f[5], 0.0);
    }

    #[test]
    fn polynomial_embedding_matches_scalar() {
        let sys = Cr3bpSystem::earth_moon();
        let x = [1.1, 0.02, -0.05, 0.01, 0.15, 0.02];
        let ctx = PolyContext::new(6, 3).unwrap();
        let p: Vec<_> = x.iter().enumerate().map(|(i, &v)| ctx.shifted_variable(i, v).unwrap()).collect();
        let fp = sys.rhs(0.0, &p).unwrap();
        let fs = sys.rhs(0.0, &x).unwrap();
        for (a, b) in fp.iter().zip(&fs) {
            assert!((a.constant_part() - b).abs() < 1e-15);
        }
    }

    #[test]
    fn jacobi_velocity_identity() {
        let mu = EARTH_MOON_MU;
        let s = [0.9, 0.1, 0.05, 0.1, -0.2, 0.3];
        let v2: f64 = s[3..].iter().map(|v| v * v).sum();
        let fast = [s[0], s[1], s[2], 2.0 * s[3], 2.0 * s[4], 2.0 * s[5]];
        let lhs = jacobi_constant(&fast, mu).unwrap();
        let rhs = jacobi_constant(&s, mu).unwrap() - 3.0 * v2;
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn singular_position_is_reported() {
        let sys = Cr3bpSystem::earth_moon();
        let mu = sys.mu();
        assert!(sys.rhs(0.0, &[1.0 - mu, 0.0, 0.0, 0.0, 0.0, 0.0]).is_err());
        assert!(Cr3bpSystem::new(0.6).is_err());
    }
}
