//! File formats: trajectories, flow maps, moments, contours and coverage.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tuq_core::contour::{ContourCurve, Point};
use tuq_core::dynamics::Trajectory;
use tuq_core::flowmap::PolyFlowMap;
use tuq_core::uq::{CentralMomentSet, SymmetricTensor};
use tuq_core::Matrix;

use crate::error::{Result, StageExt, TuqError};
use crate::study::{MethodResult, StudyReport};

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| TuqError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| TuqError::io(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| TuqError::io(path, e))
}

/// `t,x0,x1,...` at full precision.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.states().first().map_or(0, Vec::len);
    let mut out = String::from("t");
    for i in 0..n {
        let _ = write!(out, ",x{i}");
    }
    out.push('\n');
    for (t, s) in traj.times().iter().zip(traj.states()) {
        let _ = write!(out, "{t:e}");
        for v in s {
            let _ = write!(out, ",{v:e}");
        }
        out.push('\n');
    }
    out
}

pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<()> {
    write_file(path, &trajectory_csv(traj))
}

pub fn write_map(path: &Path, map: &PolyFlowMap) -> Result<()> {
    write_file(path, &map.to_text())
}

pub fn read_map(path: &Path) -> Result<PolyFlowMap> {
    let text = read_file(path)?;
    PolyFlowMap::from_text(&text).map_err(|e| TuqError::config(format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorEntry {
    pub index: Vec<usize>,
    pub value: f64,
}

/// Moments of one method, JSON-serializable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsFile {
    pub label: String,
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub third: Option<Vec<TensorEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fourth: Option<Vec<TensorEntry>>,
}

fn tensor_entries(t: &SymmetricTensor) -> Vec<TensorEntry> {
    t.entries().map(|(i, v)| TensorEntry { index: i.to_vec(), value: v }).collect()
}

fn tensor_from(entries: &[TensorEntry], dim: usize, order: usize) -> Result<SymmetricTensor> {
    let mut t = SymmetricTensor::zeros(dim, order);
    for e in entries {
        if e.index.len() != order || e.index.iter().any(|&i| i >= dim) {
            return Err(TuqError::config(format!("tensor index {:?} invalid for order {order}, dim {dim}", e.index)));
        }
        t.set(&e.index, e.value);
    }
    Ok(t)
}

impl MomentsFile {
    pub fn from_moments(label: &str, m: &CentralMomentSet) -> Self {
        let n = m.dim();
        MomentsFile {
            label: label.to_string(),
            mean: m.mean.clone(),
            covariance: (0..n).map(|i| m.cov.row(i).to_vec()).collect(),
            third: m.third.as_ref().map(tensor_entries),
            fourth: m.fourth.as_ref().map(tensor_entries),
        }
    }

    pub fn to_moments(&self) -> Result<CentralMomentSet> {
        let n = self.mean.len();
        if self.covariance.len() != n || self.covariance.iter().any(|r| r.len() != n) {
            return Err(TuqError::config(format!("covariance must be {n}x{n}")));
        }
        let cov = Matrix::from_fn(n, n, |i, j| self.covariance[i][j]);
        Ok(CentralMomentSet {
            mean: self.mean.clone(),
            cov,
            third: self.third.as_deref().map(|e| tensor_from(e, n, 3)).transpose()?,
            fourth: self.fourth.as_deref().map(|e| tensor_from(e, n, 4)).transpose()?,
        })
    }
}

pub fn write_moments(path: &Path, label: &str, m: &CentralMomentSet) -> Result<()> {
    let json = serde_json::to_string_pretty(&MomentsFile::from_moments(label, m)).expect("moments serialize");
    write_file(path, &json)
}

pub fn read_moments(path: &Path) -> Result<MomentsFile> {
    serde_json::from_str(&read_file(path)?).map_err(|e| TuqError::config(format!("{}: {e}", path.display())))
}

/// `t,x,y` with the closing point at `t = 2π`.
pub fn contour_csv(curve: &ContourCurve) -> String {
    let mut out = String::from("t,x,y\n");
    for (t, [x, y]) in curve.parametrized() {
        let _ = writeln!(out, "{t:e},{x:e},{y:e}");
    }
    out
}

pub fn write_contour(path: &Path, curve: &ContourCurve) -> Result<()> {
    write_file(path, &contour_csv(curve))
}

pub fn write_points(path: &Path, points: &[Point]) -> Result<()> {
    let mut out = String::from("x,y\n");
    for [x, y] in points {
        let _ = writeln!(out, "{x:e},{y:e}");
    }
    write_file(path, &out)
}

/// One `label contour k coverage` line per curve.
pub fn coverage_text(r: &StudyReport) -> String {
    let mut out = format!("# samples = {}\n", r.truth_points.len());
    for m in &r.methods {
        for c in &m.coverage {
            let flags = match (c.curve.fallback, c.curve.self_intersecting) {
                (true, _) => " fallback",
                (_, true) => " self-intersecting",
                _ => "",
            };
            let _ = writeln!(out, "{} {} k={} coverage={:.2}%{flags}", m.label, c.kind.label(), c.k, 100.0 * c.coverage);
        }
    }
    out
}

/// Moments JSON per method, contour and sample CSVs, and the coverage summary.
pub fn write_study_artifacts(r: &StudyReport, dir: &Path, moments_json: bool) -> Result<Vec<std::path::PathBuf>> {
    let mut written = Vec::new();
    let stem = &r.scenario;
    let mut push = |path: std::path::PathBuf, res: Result<()>| -> Result<()> {
        res?;
        written.push(path);
        Ok(())
    };
    if moments_json {
        for m in &r.methods {
            let p = dir.join(format!("{stem}_{}_moments.json", m.label));
            push(p.clone(), write_moments(&p, &m.label, &m.moments))?;
        }
    }
    for MethodResult { label, coverage, .. } in &r.methods {
        for c in coverage {
            let p = dir.join(format!("{stem}_{label}_{}.csv", c.kind.label()));
            push(p.clone(), write_contour(&p, &c.curve))?;
        }
    }
    if !r.truth_points.is_empty() {
        let p = dir.join(format!("{stem}_samples.csv"));
        push(p.clone(), write_points(&p, &r.truth_points))?;
        let p = dir.join(format!("{stem}_coverage.txt"));
        push(p.clone(), write_file(&p, &coverage_text(r)))?;
    }
    Ok(written)
}

/// Dense reference trajectory over the study arc, `n` uniform samples.
pub fn reference_trajectory<S: tuq_core::dynamics::System>(
    sys: &S,
    start: &[f64],
    horizon: f64,
    n: usize,
    settings: &tuq_core::dynamics::AdaptiveSettings,
) -> Result<Trajectory> {
    tuq_core::dynamics::integrate_dense(sys, start, 0.0, horizon, settings)
        .and_then(|sol| sol.uniform_trajectory(n))
        .stage("reference trajectory")
}
