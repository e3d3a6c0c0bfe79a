//! Scenario files.
//!
//! A scenario is one TOML document. Every table rejects unknown keys, and
//! floating-point values survive a parse/serialize/parse cycle unchanged.
//!
//! ```toml
//! name = "halo"
//! seed = 7
//! horizon = 0.9
//!
//! [system]
//! kind = "cr3bp"
//!
//! [reference]
//! kind = "halo_apolune"
//! period = 3.136654204
//! apolune_offset = 0.25
//!
//! [belief]
//! mean_deviation = [0.0, 1e-4, 0.0, 0.0, 1e-4, 0.0]
//! covariance = { kind = "stretching_inflated", isotropic = 1e-6, directional = 1e-5 }
//!
//! [[methods]]
//! method = "ut"
//! propagator = "direct"
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tuq_core::dynamics::{AdaptiveSettings, AerocaptureSystem, EARTH_MOON_MU};
use tuq_core::uq::UtParams;

use crate::error::{Result, TuqError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    /// Length of the propagation arc in the system's time unit.
    pub horizon: f64,
    /// Label of the method the others are scored against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_method: Option<String>,
    pub system: SystemConfig,
    pub reference: ReferenceConfig,
    pub belief: BeliefConfig,
    #[serde(default)]
    pub integration: IntegrationConfig,
    #[serde(default)]
    pub maps: MapConfig,
    #[serde(default)]
    pub methods: Vec<MethodConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contour: Option<ContourConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    Cr3bp {
        #[serde(default = "default_mu")]
        mu: f64,
    },
    Aerocapture {
        #[serde(default = "AeroBody::earth")]
        body: AeroBody,
    },
}

fn default_mu() -> f64 {
    EARTH_MOON_MU
}

/// Planet and vehicle constants in km, s, kg.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AeroBody {
    pub mu: f64,
    pub radius: f64,
    pub rho_interface: f64,
    pub interface_altitude: f64,
    pub scale_height: f64,
    pub ballistic_coefficient: f64,
}

impl AeroBody {
    pub fn earth() -> Self {
        let e = AerocaptureSystem::earth();
        AeroBody {
            mu: e.mu_body,
            radius: e.body_radius,
            rho_interface: e.rho_e,
            interface_altitude: e.h_e,
            scale_height: e.scale_height,
            ballistic_coefficient: e.beta,
        }
    }

    pub fn system(&self) -> tuq_core::Result<AerocaptureSystem> {
        AerocaptureSystem::new(
            self.mu,
            self.radius,
            self.rho_interface,
            self.interface_altitude,
            self.scale_height,
            self.ballistic_coefficient,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceConfig {
    /// Southern L2 halo of the given period, started `apolune_offset` after apolune.
    HaloApolune { period: f64, apolune_offset: f64 },
    /// Nominal entry from `v_inf` (km/s) and the entry flight-path angle (deg),
    /// started `t_pre` seconds before the interface.
    Aerocapture { v_inf: f64, efpa_deg: f64, t_pre: f64 },
    /// Explicit initial state.
    State { state: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeliefConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_deviation: Option<Vec<f64>>,
    pub covariance: CovarianceConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CovarianceConfig {
    /// `isotropic · I + directional · γ̂ γ̂ᵀ` with γ̂ the Cauchy–Green stretching direction.
    StretchingInflated { isotropic: f64, directional: f64 },
    /// Planar state; standard deviations in metres and metres per second along
    /// the radial and transverse directions at the start state.
    RadialTransverse {
        sigma_radial_m: f64,
        sigma_transverse_m: f64,
        sigma_radial_rate_mps: f64,
        sigma_transverse_rate_mps: f64,
    },
    Diagonal { sigmas: Vec<f64> },
    Full { matrix: Vec<Vec<f64>> },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationConfig {
    pub rtol: f64,
    pub atol: f64,
    pub direct_scheme: DirectSchemeKind,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        let a = AdaptiveSettings::default();
        IntegrationConfig { rtol: a.rtol, atol: a.atol, direct_scheme: DirectSchemeKind::Adaptive }
    }
}

impl IntegrationConfig {
    pub fn adaptive(&self) -> AdaptiveSettings {
        AdaptiveSettings { rtol: self.rtol, atol: self.atol, ..AdaptiveSettings::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectSchemeKind {
    Adaptive,
    /// Fixed-step RK4 with the system's polynomial step.
    Rk4,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub order: u8,
}

impl Default for MapConfig {
    fn default() -> Self {
        MapConfig { order: 3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagatorKind {
    #[default]
    Direct,
    Da,
    Dda,
}

impl PropagatorKind {
    pub fn label(self) -> &'static str {
        match self {
            PropagatorKind::Direct => "direct",
            PropagatorKind::Da => "da",
            PropagatorKind::Dda => "dda",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    Lincov,
    Ut,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum MethodConfig {
    Mc {
        #[serde(default)]
        propagator: PropagatorKind,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    Lincov {
        #[serde(default)]
        propagator: PropagatorKind,
    },
    Ut {
        #[serde(default)]
        propagator: PropagatorKind,
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default = "default_beta")]
        beta: f64,
        #[serde(default)]
        kappa: f64,
    },
    Cut4 {
        #[serde(default)]
        propagator: PropagatorKind,
    },
    Pce {
        #[serde(default)]
        propagator: PropagatorKind,
        #[serde(default = "default_degree")]
        degree: usize,
        #[serde(default = "default_oversampling")]
        oversampling: f64,
    },
    Gmm {
        #[serde(default)]
        propagator: PropagatorKind,
        #[serde(default = "default_depth")]
        depth: usize,
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default = "default_component")]
        component: ComponentKind,
        /// UT parameters of each component when `component = "ut"`.
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default = "default_beta")]
        beta: f64,
        #[serde(default)]
        kappa: f64,
    },
}

fn default_samples() -> usize {
    4000
}
fn default_alpha() -> f64 {
    UtParams::default().alpha
}
fn default_beta() -> f64 {
    UtParams::default().beta
}
fn default_degree() -> usize {
    3
}
fn default_oversampling() -> f64 {
    2.0
}
fn default_depth() -> usize {
    4
}
fn default_delta() -> f64 {
    0.5
}
fn default_component() -> ComponentKind {
    ComponentKind::Ut
}

impl MethodConfig {
    pub fn name(&self) -> &'static str {
        match self {
            MethodConfig::Mc { .. } => "mc",
            MethodConfig::Lincov { .. } => "lincov",
            MethodConfig::Ut { .. } => "ut",
            MethodConfig::Cut4 { .. } => "cut4",
            MethodConfig::Pce { .. } => "pce",
            MethodConfig::Gmm { .. } => "gmm",
        }
    }

    pub fn propagator(&self) -> PropagatorKind {
        match *self {
            MethodConfig::Mc { propagator, .. }
            | MethodConfig::Lincov { propagator }
            | MethodConfig::Ut { propagator, .. }
            | MethodConfig::Cut4 { propagator }
            | MethodConfig::Pce { propagator, .. }
            | MethodConfig::Gmm { propagator, .. } => propagator,
        }
    }

    /// `"<method>-<propagator>"`, unique within a scenario.
    pub fn label(&self) -> String {
        format!("{}-{}", self.name(), self.propagator().label())
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(TuqError::config(format!("method {}: {msg}", self.label())));
        match *self {
            MethodConfig::Mc { samples, .. } if samples < 2 => bad("needs at least two samples"),
            MethodConfig::Ut { alpha, .. } | MethodConfig::Gmm { alpha, .. } if !(alpha > 0.0) => {
                bad("alpha must be positive")
            }
            MethodConfig::Pce { degree, oversampling, .. } if degree == 0 || !(oversampling >= 1.0) => {
                bad("degree must be positive and oversampling at least 1")
            }
            MethodConfig::Gmm { depth, delta, .. } if depth > 12 || !(delta > 0.0 && delta < 1.0) => {
                bad("depth must be at most 12 and delta in (0, 1)")
            }
            _ => Ok(()),
        }
    }
}

pub fn ut_params(alpha: f64, beta: f64, kappa: f64) -> UtParams {
    UtParams { alpha, beta, kappa }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourConfig {
    pub slice: [usize; 2],
    #[serde(default = "default_k")]
    pub k: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    /// Label of the sampling method whose final states are counted.
    pub truth: String,
    #[serde(default = "default_true")]
    pub banana: bool,
}

fn default_k() -> f64 {
    3.0
}
fn default_points() -> usize {
    tuq_core::contour::DEFAULT_CONTOUR_POINTS
}
fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<ReportFormat>,
    /// Also write full-precision moments as JSON, one file per method.
    #[serde(default = "default_true")]
    pub moments_json: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out"), formats: default_formats(), moments_json: true }
    }
}

fn default_formats() -> Vec<ReportFormat> {
    vec![ReportFormat::Csv, ReportFormat::Text]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    Text,
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Text => "text",
        })
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| TuqError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| TuqError::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| TuqError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn state_dim(&self) -> usize {
        match (&self.system, &self.reference) {
            (_, ReferenceConfig::State { state }) => state.len(),
            (SystemConfig::Cr3bp { .. }, _) => 6,
            (SystemConfig::Aerocapture { .. }, _) => 4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(TuqError::config(msg));
        if i64::try_from(self.seed).is_err() {
            return err(format!("seed {} does not fit a TOML integer (max {})", self.seed, i64::MAX));
        }
        if !(self.horizon.is_finite() && self.horizon != 0.0) {
            return err("horizon must be finite and non-zero".into());
        }
        match (&self.system, &self.reference) {
            (SystemConfig::Cr3bp { mu }, r) => {
                if !(*mu > 0.0 && *mu < 0.5) {
                    return err(format!("mass ratio {mu} outside (0, 0.5)"));
                }
                if matches!(r, ReferenceConfig::Aerocapture { .. }) {
                    return err("aerocapture reference needs the aerocapture system".into());
                }
            }
            (SystemConfig::Aerocapture { .. }, ReferenceConfig::HaloApolune { .. }) => {
                return err("halo reference needs the cr3bp system".into());
            }
            _ => {}
        }
        let n = self.state_dim();
        match &self.system {
            SystemConfig::Cr3bp { .. } if n != 6 => return err(format!("cr3bp state has 6 components, got {n}")),
            SystemConfig::Aerocapture { .. } if n != 4 => {
                return err(format!("aerocapture state has 4 components, got {n}"))
            }
            _ => {}
        }
        if let Some(m) = &self.belief.mean_deviation {
            if m.len() != n {
                return err(format!("mean deviation has {} components, state has {n}", m.len()));
            }
        }
        match &self.belief.covariance {
            CovarianceConfig::RadialTransverse { .. } if n != 4 => {
                return err("radial/transverse covariance needs a planar state".into())
            }
            CovarianceConfig::Diagonal { sigmas } if sigmas.len() != n => {
                return err(format!("diagonal covariance has {} entries, state has {n}", sigmas.len()))
            }
            CovarianceConfig::Full { matrix } if matrix.len() != n || matrix.iter().any(|r| r.len() != n) => {
                return err(format!("covariance matrix must be {n}x{n}"))
            }
            _ => {}
        }
        if self.maps.order == 0 || self.maps.order > tuq_core::poly::MAX_ORDER {
            return err(format!("map order must be in 1..={}", tuq_core::poly::MAX_ORDER));
        }
        let mut labels = BTreeSet::new();
        for m in &self.methods {
            m.validate()?;
            if !labels.insert(m.label()) {
                return err(format!("method {} requested twice", m.label()));
            }
        }
        if let Some(r) = &self.reference_method {
            if !labels.contains(r) {
                return err(format!("reference method {r} is not in the method list"));
            }
        }
        if let Some(c) = &self.contour {
            if c.slice[0] == c.slice[1] || c.slice.iter().any(|&i| i >= n) {
                return err(format!("contour slice {:?} invalid for a {n}-state", c.slice));
            }
            if !(c.k > 0.0) || c.points < 3 {
                return err("contour needs k > 0 and at least three points".into());
            }
            if !labels.contains(&c.truth) || !c.truth.starts_with("mc-") {
                return err(format!("contour truth {} must be a configured mc method", c.truth));
            }
        }
        Ok(())
    }

    /// Replaces the seed, output directory and Monte Carlo sample counts where given.
    pub fn apply_overrides(&mut self, seed: Option<u64>, out_dir: Option<&Path>, samples: Option<usize>) -> Result<()> {
        if let Some(s) = seed {
            self.seed = s;
        }
        if let Some(d) = out_dir {
            self.output.dir = d.to_path_buf();
        }
        if let Some(n) = samples {
            for m in &mut self.methods {
                if let MethodConfig::Mc { samples, .. } = m {
                    *samples = n;
                }
            }
        }
        self.validate()
    }
}
