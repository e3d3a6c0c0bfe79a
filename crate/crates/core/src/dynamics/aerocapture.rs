use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{integrate, integrate_dense, AdaptiveSettings, FixedStep, System};
use crate::algebra::Algebra;
use crate::error::{check_len, Error, Result};

/// Exponents below this make `exp` underflow; density is clamped to zero there.
const UNDERFLOW_EXPONENT: f64 = -700.0;

/// Planar two-body motion with exponential-atmosphere drag.
///
/// State `(x, y, vx, vy)` in km and km/s. Drag uses the inertial speed
/// (non-rotating atmosphere): `a_D = −ρ v v⃗ / (2β)`, with ρ in kg/m³ and β in
/// kg/m², converted to km/s².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AerocaptureSystem {
    pub mu_body: f64,
    pub body_radius: f64,
    pub rho_e: f64,
    pub h_e: f64,
    pub scale_height: f64,
    pub beta: f64,
}

impl AerocaptureSystem {
    pub fn new(mu_body: f64, body_radius: f64, rho_e: f64, h_e: f64, scale_height: f64, beta: f64) -> Result<Self> {
        let s = AerocaptureSystem { mu_body, body_radius, rho_e, h_e, scale_height, beta };
        if [mu_body, body_radius, rho_e, h_e, scale_height, beta].iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::invalid("aerocapture parameters must be positive and finite"));
        }
        Ok(s)
    }

    /// Earth with the exponential atmosphere used by the aerocapture study.
    pub fn earth() -> Self {
        AerocaptureSystem {
            mu_body: 398600.4418,
            body_radius: 6378.137,
            rho_e: 5.0e-7,
            h_e: 100.0,
            scale_height: 7.2,
            beta: 500.0,
        }
    }

    /// Density in kg/m³ at altitude `h` (km).
    pub fn density(&self, h: f64) -> f64 {
        let e = -(h - self.h_e) / self.scale_height;
        if e < UNDERFLOW_EXPONENT {
            0.0
        } else {
            self.rho_e * e.exp()
        }
    }

    /// Radius of the atmospheric interface.
    pub fn interface_radius(&self) -> f64 {
        self.body_radius + self.h_e
    }

    pub fn elements(&self, state: &[f64]) -> Result<OrbitElements> {
        OrbitElements::from_state(state, self.mu_body)
    }

    fn gravity_and_drag<T: Algebra>(&self, s: &[T], drag: bool) -> Result<Vec<T>> {
        check_len(4, s.len())?;
        let (x, y, vx, vy) = (&s[0], &s[1], &s[2], &s[3]);
        let r2 = x.square().plus(&y.square());
        if !(r2.constant_part() > 0.0) {
            return Err(Error::Singular("radius is zero"));
        }
        let inv_r = r2.try_inv_sqrt()?;
        let g = inv_r.square().times(&inv_r).scale(-self.mu_body);
        let mut ax = g.times(x);
        let mut ay = g.times(y);
        if drag {
            let r = r2.times(&inv_r);
            let exponent = r.shift(-(self.body_radius + self.h_e)).scale(-1.0 / self.scale_height);
            if exponent.constant_part() >= UNDERFLOW_EXPONENT {
                let v = vx.square().plus(&vy.square()).try_sqrt()?;
                // ρ v / (2β) with the m → km factor.
                let k = exponent.try_exp()?.times(&v).scale(self.rho_e * 1000.0 / (2.0 * self.beta));
                ax = ax.minus(&k.times(vx));
                ay = ay.minus(&k.times(vy));
            }
        }
        Ok(vec![vx.clone(), vy.clone(), ax, ay])
    }
}

impl Default for AerocaptureSystem {
    fn default() -> Self {
        Self::earth()
    }
}

impl System for AerocaptureSystem {
    fn dim(&self) -> usize {
        4
    }

    fn name(&self) -> &'static str {
        "aerocapture"
    }

    fn rhs<T: Algebra>(&self, _t: f64, s: &[T]) -> Result<Vec<T>> {
        self.gravity_and_drag(s, true)
    }

    fn default_fixed_step(&self) -> FixedStep {
        FixedStep::step_size(0.05)
    }
}

/// Drag-free planar two-body motion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KeplerSystem(pub AerocaptureSystem);

impl System for KeplerSystem {
    fn dim(&self) -> usize {
        4
    }

    fn name(&self) -> &'static str {
        "kepler"
    }

    fn rhs<T: Algebra>(&self, _t: f64, s: &[T]) -> Result<Vec<T>> {
        self.0.gravity_and_drag(s, false)
    }

    fn default_fixed_step(&self) -> FixedStep {
        FixedStep::step_size(0.05)
    }
}

/// Planar osculating elements.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitElements {
    /// Specific energy, km²/s².
    pub energy: f64,
    /// Specific angular momentum, km²/s.
    pub angular_momentum: f64,
    pub eccentricity: f64,
    /// Semi-major axis (negative on hyperbolas), km.
    pub semi_major_axis: f64,
}

impl OrbitElements {
    pub fn from_state(state: &[f64], mu: f64) -> Result<Self> {
        check_len(4, state.len())?;
        let r = state[0].hypot(state[1]);
        if r == 0.0 {
            return Err(Error::Singular("radius is zero"));
        }
        let v2 = state[2] * state[2] + state[3] * state[3];
        let energy = 0.5 * v2 - mu / r;
        let h = state[0] * state[3] - state[1] * state[2];
        let e2 = 1.0 + 2.0 * energy * h * h / (mu * mu);
        Ok(OrbitElements {
            energy,
            angular_momentum: h,
            eccentricity: e2.max(0.0).sqrt(),
            semi_major_axis: -mu / (2.0 * energy),
        })
    }

    /// Apoapsis radius of a bound orbit.
    pub fn apoapsis_radius(&self) -> Option<f64> {
        (self.energy < 0.0).then_some(self.semi_major_axis * (1.0 + self.eccentricity))
    }
}

/// Reference trajectory of the aerocapture study.
#[derive(Clone, Debug, PartialEq)]
pub struct AerocaptureNominal {
    /// State at the atmospheric interface, radial along +x.
    pub entry_state: Vec<f64>,
    /// State `t_pre` seconds before entry.
    pub pre_entry_state: Vec<f64>,
    pub t_pre: f64,
    pub entry_speed: f64,
    pub inbound: OrbitElements,
}

impl AerocaptureNominal {
    /// Propagates the entry state with drag until the interface is crossed outward.
    ///
    /// Returns the flight time in the atmosphere and the exit state.
    pub fn atmospheric_exit(&self, sys: &AerocaptureSystem, settings: &AdaptiveSettings) -> Result<(f64, Vec<f64>)> {
        let horizon = 5000.0;
        let sol = integrate_dense(sys, &self.entry_state, 0.0, horizon, settings)?;
        let r_i = sys.interface_radius();
        let crossings = sol.crossings(|_, x| x[0].hypot(x[1]) - r_i, 1, 1e-3, 1e-6);
        crossings
            .into_iter()
            .next()
            .ok_or_else(|| Error::Construction("vehicle did not leave the atmosphere".into()))
    }
}

/// Entry state at the interface from `v∞` (km/s) and the flight-path angle (degrees),
/// plus the state `t_pre` seconds earlier on the drag-free arc.
pub fn build_aerocapture_nominal(
    v_inf: f64,
    efpa_deg: f64,
    t_pre: f64,
    sys: &AerocaptureSystem,
    settings: &AdaptiveSettings,
) -> Result<AerocaptureNominal> {
    if !(v_inf > 0.0 && v_inf.is_finite()) {
        return Err(Error::Construction("hyperbolic excess speed must be positive".into()));
    }
    if !(efpa_deg > -90.0 && efpa_deg <= 0.0) {
        return Err(Error::Construction(alloc::format!(
            "entry flight-path angle {efpa_deg}° is unreachable on an inbound hyperbola"
        )));
    }
    if !(t_pre >= 0.0 && t_pre.is_finite()) {
        return Err(Error::invalid("pre-entry time must be non-negative"));
    }
    let r = sys.interface_radius();
    let v = (v_inf * v_inf + 2.0 * sys.mu_body / r).sqrt();
    let gamma = efpa_deg.to_radians();
    let entry_state = vec![r, 0.0, v * gamma.sin(), v * gamma.cos()];
    let pre_entry_state = integrate(&KeplerSystem(*sys), &entry_state, 0.0, -t_pre, settings)?;
    Ok(AerocaptureNominal {
        inbound: sys.elements(&entry_state)?,
        entry_state,
        pre_entry_state,
        t_pre,
        entry_speed: v,
    })
}
