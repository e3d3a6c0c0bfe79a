//! End-to-end studies: reference construction, initial belief, flow maps, every
//! configured method, errors against a reference method and contour coverage.

use std::time::Instant;

use tuq_core::contour::{
    banana_contour, coverage, gaussian_ellipse, projected_moments_from_tensors, whiten, ContourCurve, ContourKind,
    Point, SliceSpec,
};
use tuq_core::dynamics::{
    build_aerocapture_nominal, integrate, jacobi_constant, locate_apolune, southern_l2_halo, stm_propagate,
    AerocaptureSystem, Cr3bpSystem, System,
};
use tuq_core::flowmap::{build_da_map, build_dda_map, stretching_direction, DirectionFrame, PolyFlowMap};
use tuq_core::uq::{
    covariance_error, cut4_run, gmm_propagate, gmm_split, lincov, mc_run, mean_error, pce_fit, pce_moments,
    sample_mean_covariance, ut_run, weighted_central_moments, CentralMomentSet, ComponentMethod, DirectPropagator,
    DirectScheme, GaussianBelief, MappedPropagator, Propagator, WeightedEnsemble,
};
use tuq_core::Matrix;

use crate::config::{
    ut_params, ComponentKind, CovarianceConfig, DirectSchemeKind, MethodConfig, PropagatorKind, ReferenceConfig,
    ScenarioConfig, SystemConfig,
};
use crate::error::{Result, StageExt, TuqError};

/// Evaluation batches run on the calling thread only.
pub const EVALUATION_THREADS: usize = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Timing {
    pub label: String,
    pub seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorPair {
    pub mean: f64,
    pub covariance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageResult {
    pub kind: ContourKind,
    pub k: f64,
    /// Fraction in [0, 1].
    pub coverage: f64,
    pub curve: ContourCurve,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodResult {
    pub label: String,
    pub method: &'static str,
    pub propagator: PropagatorKind,
    /// Number of propagations (samples, sigma points, design points).
    pub evaluations: usize,
    pub eval_seconds: f64,
    pub moments: CentralMomentSet,
    pub errors: Option<ErrorPair>,
    pub coverage: Vec<CoverageResult>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyReport {
    pub scenario: String,
    pub seed: u64,
    pub threads: usize,
    /// Reference trajectory and linearization work; not part of any method.
    pub setup: Vec<Timing>,
    /// Flow-map construction, disjoint from every evaluation row.
    pub construction: Vec<Timing>,
    pub methods: Vec<MethodResult>,
    pub reference_method: Option<String>,
    /// Scalar facts about the reference (period, Jacobi constant, flight time, ...).
    pub diagnostics: Vec<(String, f64)>,
    pub slice: Option<[usize; 2]>,
    /// Truth samples in the contour slice.
    pub truth_points: Vec<Point>,
}

impl StudyReport {
    pub fn method(&self, label: &str) -> Option<&MethodResult> {
        self.methods.iter().find(|m| m.label == label)
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn coverage_of(&self, label: &str, kind: ContourKind) -> Option<f64> {
        self.method(label)?.coverage.iter().find(|c| c.kind == kind).map(|c| c.coverage)
    }
}

/// The start of the UQ arc and the system it lives in.
#[derive(Clone, Debug)]
pub struct Scenario<S> {
    pub system: S,
    pub start: Vec<f64>,
    pub horizon: f64,
    pub setup: Vec<Timing>,
    pub diagnostics: Vec<(String, f64)>,
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let t = Instant::now();
    let out = f()?;
    Ok((out, t.elapsed().as_secs_f64()))
}

pub fn cr3bp_scenario(cfg: &ScenarioConfig) -> Result<Scenario<Cr3bpSystem>> {
    let SystemConfig::Cr3bp { mu } = cfg.system else {
        return Err(TuqError::config("cr3bp study needs system kind cr3bp"));
    };
    let system = Cr3bpSystem::new(mu).stage("system")?;
    let mut setup = Vec::new();
    let mut diagnostics = Vec::new();
    let start = match &cfg.reference {
        ReferenceConfig::HaloApolune { period, apolune_offset } => {
            let (orbit, secs) = timed(|| southern_l2_halo(&system, *period).stage("halo"))?;
            setup.push(Timing { label: "halo".into(), seconds: secs });
            diagnostics.push(("period".into(), orbit.period));
            diagnostics.push(("jacobi_constant".into(), orbit.jacobi_constant));
            let (t_apo, _) = locate_apolune(&system, &orbit).stage("apolune")?;
            diagnostics.push(("apolune_time".into(), t_apo));
            integrate(&system, &orbit.initial_state, 0.0, t_apo + apolune_offset, &cfg.integration.adaptive())
                .stage("start state")?
        }
        ReferenceConfig::State { state } => {
            diagnostics.push(("jacobi_constant".into(), jacobi_constant(state, mu).stage("start state")?));
            state.clone()
        }
        ReferenceConfig::Aerocapture { .. } => return Err(TuqError::config("aerocapture reference in a cr3bp study")),
    };
    Ok(Scenario { system, start, horizon: cfg.horizon, setup, diagnostics })
}

pub fn aerocapture_scenario(cfg: &ScenarioConfig) -> Result<Scenario<AerocaptureSystem>> {
    let SystemConfig::Aerocapture { body } = &cfg.system else {
        return Err(TuqError::config("aerocapture study needs system kind aerocapture"));
    };
    let system = body.system().stage("system")?;
    let settings = cfg.integration.adaptive();
    let mut diagnostics = Vec::new();
    let mut setup = Vec::new();
    let start = match &cfg.reference {
        ReferenceConfig::Aerocapture { v_inf, efpa_deg, t_pre } => {
            let (nominal, secs) =
                timed(|| build_aerocapture_nominal(*v_inf, *efpa_deg, *t_pre, &system, &settings).stage("nominal"))?;
            setup.push(Timing { label: "nominal".into(), seconds: secs });
            diagnostics.push(("entry_speed".into(), nominal.entry_speed));
            diagnostics.push(("inbound_eccentricity".into(), nominal.inbound.eccentricity));
            let (t_exit, exit) = nominal.atmospheric_exit(&system, &settings).stage("atmospheric pass")?;
            let el = system.elements(&exit).stage("exit elements")?;
            diagnostics.push(("flight_time".into(), t_exit));
            diagnostics.push(("exit_eccentricity".into(), el.eccentricity));
            if let Some(ra) = el.apoapsis_radius() {
                diagnostics.push(("apoapsis_altitude".into(), ra - system.body_radius));
            }
            nominal.pre_entry_state
        }
        ReferenceConfig::State { state } => state.clone(),
        ReferenceConfig::HaloApolune { .. } => return Err(TuqError::config("halo reference in an aerocapture study")),
    };
    Ok(Scenario { system, start, horizon: cfg.horizon, setup, diagnostics })
}

/// `Rot · diag(σ²) · Rotᵀ` with the radial/transverse basis at `state`; σ in km and km/s.
pub fn radial_transverse_covariance(state: &[f64], sigmas_km: [f64; 4]) -> tuq_core::Result<Matrix> {
    if state.len() != 4 {
        return Err(tuq_core::Error::DimensionMismatch { expected: 4, got: state.len() });
    }
    let r = state[0].hypot(state[1]);
    if !(r > 0.0) {
        return Err(tuq_core::Error::InvalidArgument("radial direction undefined at the origin".into()));
    }
    let (c, s) = (state[0] / r, state[1] / r);
    let rot = Matrix::from_rows(&[&[c, -s, 0.0, 0.0], &[s, c, 0.0, 0.0], &[0.0, 0.0, c, -s], &[0.0, 0.0, s, c]]);
    let d = Matrix::from_diagonal(&sigmas_km.map(|v| v * v));
    Ok(rot.congruence(&d)?.symmetrized())
}

pub(crate) fn build_belief(cfg: &ScenarioConfig, start: &[f64], stm: Option<&Matrix>) -> Result<GaussianBelief> {
    let n = start.len();
    let cov = match &cfg.belief.covariance {
        CovarianceConfig::StretchingInflated { isotropic, directional } => {
            let gamma = stretching_direction(stm.expect("stm computed for stretching recipe")).stage("belief")?;
            Matrix::identity(n).scale(*isotropic).add(&Matrix::outer(&gamma, &gamma).scale(*directional)).stage("belief")?
        }
        CovarianceConfig::RadialTransverse {
            sigma_radial_m,
            sigma_transverse_m,
            sigma_radial_rate_mps,
            sigma_transverse_rate_mps,
        } => radial_transverse_covariance(
            start,
            [*sigma_radial_m, *sigma_transverse_m, *sigma_radial_rate_mps, *sigma_transverse_rate_mps].map(|v| v / 1e3),
        )
        .stage("belief")?,
        CovarianceConfig::Diagonal { sigmas } => Matrix::from_diagonal(&sigmas.iter().map(|s| s * s).collect::<Vec<_>>()),
        CovarianceConfig::Full { matrix } => Matrix::from_fn(n, n, |i, j| matrix[i][j]),
    };
    let mean = cfg.belief.mean_deviation.clone().unwrap_or_else(|| vec![0.0; n]);
    GaussianBelief::new(mean, cov).stage("belief")
}

/// Flow maps requested by the method list.
struct Maps {
    da: Option<PolyFlowMap>,
    dda: Option<PolyFlowMap>,
}

fn needs(cfg: &ScenarioConfig, kind: PropagatorKind) -> bool {
    cfg.methods.iter().any(|m| m.propagator() == kind)
}

fn higher_moments_wanted(cfg: &ScenarioConfig, m: &MethodConfig) -> bool {
    let Some(c) = &cfg.contour else { return false };
    c.banana
        && m.label() != c.truth
        && matches!(m, MethodConfig::Mc { .. } | MethodConfig::Ut { .. } | MethodConfig::Cut4 { .. } | MethodConfig::Pce { .. })
}

fn with_higher(mut base: CentralMomentSet, ens: &WeightedEnsemble, want: bool) -> tuq_core::Result<CentralMomentSet> {
    if want {
        let full = weighted_central_moments(ens, 4)?;
        base.third = full.third;
        base.fourth = full.fourth;
    }
    Ok(base)
}

/// Runs one method; returns its moments, the number of propagations and, for
/// Monte Carlo, the propagated ensemble.
fn run_method(
    m: &MethodConfig,
    prop: &dyn Propagator,
    belief: &GaussianBelief,
    seed: u64,
    higher: bool,
) -> tuq_core::Result<(CentralMomentSet, usize, Option<WeightedEnsemble>)> {
    match *m {
        MethodConfig::Mc { samples, .. } => {
            let ens = mc_run(prop, belief, samples, seed)?;
            let moments = with_higher(sample_mean_covariance(&ens)?, &ens, higher)?;
            Ok((moments, samples, Some(ens)))
        }
        MethodConfig::Lincov { .. } => {
            let (xf, stm) = prop.linearize()?;
            Ok((lincov(&xf, &stm, belief)?, 1, None))
        }
        MethodConfig::Ut { alpha, beta, kappa, .. } => {
            let (ens, moments) = ut_run(prop, belief, &ut_params(alpha, beta, kappa))?;
            let n = ens.len();
            Ok((with_higher(moments, &ens, higher)?, n, None))
        }
        MethodConfig::Cut4 { .. } => {
            let (ens, moments) = cut4_run(prop, belief, if higher { 4 } else { 2 })?;
            Ok((moments, ens.len(), None))
        }
        MethodConfig::Pce { degree, oversampling, .. } => {
            let s = pce_fit(prop, belief, degree, oversampling, seed)?;
            let design = (oversampling * s.indices().len() as f64).ceil() as usize;
            Ok((pce_moments(&s, if higher { 4 } else { 2 }, seed)?, design, None))
        }
        MethodConfig::Gmm { depth, delta, component, alpha, beta, kappa, .. } => {
            let mix = gmm_split(belief, depth, delta)?;
            let (method, per) = match component {
                ComponentKind::Lincov => (ComponentMethod::LinCov, 1),
                ComponentKind::Ut => (ComponentMethod::Ut(ut_params(alpha, beta, kappa)), 2 * belief.dim() + 1),
            };
            let (_, total) = gmm_propagate(&mix, prop, method)?;
            Ok((total, mix.len() * per, None))
        }
    }
}

/// Runs the configured methods on an already constructed scenario.
pub fn run_study<S: System + Clone>(cfg: &ScenarioConfig, sc: Scenario<S>) -> Result<StudyReport> {
    cfg.validate()?;
    let Scenario { system, start, horizon, mut setup, diagnostics } = sc;
    let step = system.default_fixed_step();
    let direct_scheme = match cfg.integration.direct_scheme {
        DirectSchemeKind::Adaptive => DirectScheme::Adaptive(cfg.integration.adaptive()),
        DirectSchemeKind::Rk4 => DirectScheme::Rk4(step),
    };
    let direct = DirectPropagator::new(system.clone(), start.clone(), 0.0, horizon)
        .stage("direct propagator")?
        .with_scheme(direct_scheme);

    let wants_stm = matches!(cfg.belief.covariance, CovarianceConfig::StretchingInflated { .. })
        || needs(cfg, PropagatorKind::Dda);
    let stm = if wants_stm {
        let ((_, stm), secs) = timed(|| stm_propagate(&system, &start, 0.0, horizon, step).stage("stm"))?;
        setup.push(Timing { label: "stm".into(), seconds: secs });
        Some(stm)
    } else {
        None
    };
    let belief = build_belief(cfg, &start, stm.as_ref())?;

    let mut construction = Vec::new();
    let mut maps = Maps { da: None, dda: None };
    let order = cfg.maps.order;
    if needs(cfg, PropagatorKind::Da) {
        let (map, secs) = timed(|| build_da_map(&system, &start, 0.0, horizon, order, step).stage("da map"))?;
        construction.push(Timing { label: "da".into(), seconds: secs });
        maps.da = Some(map);
    }
    if needs(cfg, PropagatorKind::Dda) {
        let gamma = stretching_direction(stm.as_ref().expect("stm computed for dda")).stage("dda map")?;
        let frame = DirectionFrame::new(&gamma).stage("dda map")?;
        let (map, secs) =
            timed(|| build_dda_map(&system, &start, 0.0, horizon, order, &frame, step).stage("dda map"))?;
        construction.push(Timing { label: "dda".into(), seconds: secs });
        maps.dda = Some(map);
    }

    let mut methods = Vec::with_capacity(cfg.methods.len());
    let mut truth = None;
    for m in &cfg.methods {
        let mapped;
        let prop: &dyn Propagator = match m.propagator() {
            PropagatorKind::Direct => &direct,
            PropagatorKind::Da => {
                mapped = MappedPropagator::new(maps.da.as_ref().expect("da map built"));
                &mapped
            }
            PropagatorKind::Dda => {
                mapped = MappedPropagator::new(maps.dda.as_ref().expect("dda map built"));
                &mapped
            }
        };
        let higher = higher_moments_wanted(cfg, m);
        let t = Instant::now();
        let (moments, evaluations, ens) = run_method(m, prop, &belief, cfg.seed, higher).stage(m.name())?;
        let eval_seconds = t.elapsed().as_secs_f64();
        let label = m.label();
        if cfg.contour.as_ref().is_some_and(|c| c.truth == label) {
            truth = ens;
        }
        methods.push(MethodResult {
            label,
            method: m.name(),
            propagator: m.propagator(),
            evaluations,
            eval_seconds,
            moments,
            errors: None,
            coverage: Vec::new(),
        });
    }

    if let Some(r) = &cfg.reference_method {
        let reference = methods.iter().find(|m| &m.label == r).expect("validated").moments.clone();
        for m in &mut methods {
            m.errors = Some(ErrorPair {
                mean: mean_error(&m.moments.mean, &reference.mean).stage("errors")?,
                covariance: covariance_error(&m.moments.cov, &reference.cov).stage("errors")?,
            });
        }
    }

    let mut truth_points = Vec::new();
    if let Some(c) = &cfg.contour {
        let slice = SliceSpec::new(c.slice[0], c.slice[1], c.k).stage("contour")?;
        let truth = truth.expect("validated truth method");
        truth_points = slice.points(truth.states()).stage("contour")?;
        for m in methods.iter_mut().filter(|m| m.label != c.truth) {
            m.coverage = contour_coverage(&m.moments, &slice, c.points, c.banana, &truth_points).stage("coverage")?;
        }
    }

    Ok(StudyReport {
        scenario: cfg.name.clone(),
        seed: cfg.seed,
        threads: EVALUATION_THREADS,
        setup,
        construction,
        methods,
        reference_method: cfg.reference_method.clone(),
        diagnostics,
        slice: cfg.contour.as_ref().map(|c| c.slice),
        truth_points,
    })
}

/// Ellipse from the slice mean and covariance, plus the banana when third and
/// fourth moments are available.
pub fn contour_coverage(
    moments: &CentralMomentSet,
    slice: &SliceSpec,
    n_points: usize,
    banana: bool,
    samples: &[Point],
) -> tuq_core::Result<Vec<CoverageResult>> {
    let (mu, sigma) = slice.mean_covariance(moments)?;
    let mut out = Vec::new();
    let ellipse = gaussian_ellipse(mu, &sigma, slice.k(), n_points)?;
    out.push(CoverageResult { kind: ContourKind::Ellipse, k: slice.k(), coverage: coverage(&ellipse, samples)?, curve: ellipse });
    if let (true, Some(third), Some(fourth)) = (banana, &moments.third, &moments.fourth) {
        let frame = whiten(mu, &sigma)?;
        let pm = projected_moments_from_tensors(third, fourth, slice, &frame)?;
        let curve = banana_contour(mu, &sigma, &pm, slice.k(), n_points)?;
        out.push(CoverageResult { kind: ContourKind::Banana, k: slice.k(), coverage: coverage(&curve, samples)?, curve });
    }
    Ok(out)
}

pub fn run_cr3bp_study(cfg: &ScenarioConfig) -> Result<StudyReport> {
    cfg.validate()?;
    run_study(cfg, cr3bp_scenario(cfg)?)
}

pub fn run_aerocapture_study(cfg: &ScenarioConfig) -> Result<StudyReport> {
    cfg.validate()?;
    run_study(cfg, aerocapture_scenario(cfg)?)
}

/// Dispatches on the configured system.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<StudyReport> {
    match cfg.system {
        SystemConfig::Cr3bp { .. } => run_cr3bp_study(cfg),
        SystemConfig::Aerocapture { .. } => run_aerocapture_study(cfg),
    }
}
