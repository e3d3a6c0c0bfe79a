//! Timing sweep of Monte Carlo batches: direct integration against full and
//! directional map evaluation, with map construction timed separately.

use std::time::Instant;

use tuq_core::dynamics::{stm_propagate, System};
use tuq_core::flowmap::{build_da_map, build_dda_map, stretching_direction, DirectionFrame};
use tuq_core::uq::{mc_run, DirectPropagator, DirectScheme, MappedPropagator, Propagator};

use crate::config::{DirectSchemeKind, ScenarioConfig, SystemConfig};
use crate::error::{Result, StageExt};
use crate::report::{sig6, CsvTable, TIMING_NOTE};
use crate::study::{aerocapture_scenario, build_belief, cr3bp_scenario, Scenario, EVALUATION_THREADS};

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub samples: usize,
    pub direct: f64,
    pub da: f64,
    pub dda: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub scenario: String,
    pub threads: usize,
    pub da_construction: f64,
    pub dda_construction: f64,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    /// Batch size at which building the map and evaluating it costs as much as
    /// direct propagation, from the per-sample times of the largest batch.
    /// `None` when evaluation is not cheaper than integration.
    pub fn break_even(&self, directional: bool) -> Option<f64> {
        let row = self.rows.iter().max_by_key(|r| r.samples)?;
        let n = row.samples as f64;
        let (build, eval) = if directional { (self.dda_construction, row.dda) } else { (self.da_construction, row.da) };
        let saving = (row.direct - eval) / n;
        (saving > 0.0).then(|| build / saving)
    }

    pub fn to_table(&self) -> CsvTable {
        let mut t = CsvTable::new(&["samples", "direct_seconds", "da_seconds", "dda_seconds"]);
        t.comments.push(format!("{TIMING_NOTE}; threads={}", self.threads));
        t.comments.push(format!("construction da={} dda={}", sig6(self.da_construction), sig6(self.dda_construction)));
        for r in &self.rows {
            t.push(vec![r.samples.to_string(), sig6(r.direct), sig6(r.da), sig6(r.dda)]);
        }
        t
    }
}

fn seconds(f: impl FnOnce() -> Result<()>) -> Result<f64> {
    let t = Instant::now();
    f()?;
    Ok(t.elapsed().as_secs_f64())
}

fn bench_with<S: System + Clone>(cfg: &ScenarioConfig, sc: Scenario<S>, counts: &[usize]) -> Result<BenchReport> {
    let step = sc.system.default_fixed_step();
    let (_, stm) = stm_propagate(&sc.system, &sc.start, 0.0, sc.horizon, step).stage("stm")?;
    let belief = build_belief(cfg, &sc.start, Some(&stm))?;
    let scheme = match cfg.integration.direct_scheme {
        DirectSchemeKind::Adaptive => DirectScheme::Adaptive(cfg.integration.adaptive()),
        DirectSchemeKind::Rk4 => DirectScheme::Rk4(step),
    };
    let direct = DirectPropagator::new(sc.system.clone(), sc.start.clone(), 0.0, sc.horizon)
        .stage("direct propagator")?
        .with_scheme(scheme);

    let order = cfg.maps.order;
    let t = Instant::now();
    let da = build_da_map(&sc.system, &sc.start, 0.0, sc.horizon, order, step).stage("da map")?;
    let da_construction = t.elapsed().as_secs_f64();
    let frame = DirectionFrame::new(&stretching_direction(&stm).stage("dda map")?).stage("dda map")?;
    let t = Instant::now();
    let dda = build_dda_map(&sc.system, &sc.start, 0.0, sc.horizon, order, &frame, step).stage("dda map")?;
    let dda_construction = t.elapsed().as_secs_f64();

    let mut rows = Vec::with_capacity(counts.len());
    for &n in counts {
        let run = |p: &dyn Propagator| seconds(|| mc_run(p, &belief, n, cfg.seed).map(|_| ()).stage("mc"));
        let direct_s = run(&direct)?;
        let da_s = run(&MappedPropagator::new(&da))?;
        let dda_s = run(&MappedPropagator::new(&dda))?;
        rows.push(BenchRow { samples: n, direct: direct_s, da: da_s, dda: dda_s });
    }
    Ok(BenchReport { scenario: cfg.name.clone(), threads: EVALUATION_THREADS, da_construction, dda_construction, rows })
}

pub fn run_bench(cfg: &ScenarioConfig, counts: &[usize]) -> Result<BenchReport> {
    cfg.validate()?;
    match cfg.system {
        SystemConfig::Cr3bp { .. } => bench_with(cfg, cr3bp_scenario(cfg)?, counts),
        SystemConfig::Aerocapture { .. } => bench_with(cfg, aerocapture_scenario(cfg)?, counts),
    }
}
