//! Confidence boundaries in a 2D slice of the propagated state: the Gaussian
//! ellipse, the analytic banana contour built from projected third and fourth
//! moments, and Monte Carlo coverage of a closed polyline.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{check_len, Error, Result};
use crate::linalg::Matrix;
use crate::uq::{CentralMomentSet, SymmetricTensor, WeightedEnsemble};

pub const DEFAULT_CONTOUR_POINTS: usize = 720;

const FOURTH_MOMENT_GUARD: f64 = 1e-9;

pub type Point = [f64; 2];

/// Pair of state indices and a confidence scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceSpec {
    indices: (usize, usize),
    k: f64,
}

impl SliceSpec {
    pub fn new(i: usize, j: usize, k: f64) -> Result<Self> {
        if i == j {
            return Err(Error::invalid("slice indices must be distinct"));
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::invalid("confidence scale must be positive"));
        }
        Ok(SliceSpec { indices: (i, j), k })
    }

    pub fn indices(&self) -> (usize, usize) {
        self.indices
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    fn check(&self, dim: usize) -> Result<()> {
        let (i, j) = self.indices;
        if i >= dim || j >= dim {
            return Err(Error::invalid("slice index out of range"));
        }
        Ok(())
    }

    pub fn point(&self, state: &[f64]) -> Result<Point> {
        self.check(state.len())?;
        Ok([state[self.indices.0], state[self.indices.1]])
    }

    pub fn points(&self, states: &[Vec<f64>]) -> Result<Vec<Point>> {
        states.iter().map(|s| self.point(s)).collect()
    }

    /// The ensemble restricted to the two slice coordinates, weights unchanged.
    pub fn restrict(&self, ens: &WeightedEnsemble) -> Result<WeightedEnsemble> {
        self.check(ens.dim())?;
        let states = ens.states().iter().map(|s| alloc::vec![s[self.indices.0], s[self.indices.1]]).collect();
        ens.with_states(states)
    }

    /// Slice mean and 2×2 covariance.
    pub fn mean_covariance(&self, m: &CentralMomentSet) -> Result<(Point, Matrix)> {
        self.check(m.dim())?;
        let (i, j) = self.indices;
        let sigma = Matrix::from_rows(&[&[m.cov[(i, i)], m.cov[(i, j)]], &[m.cov[(j, i)], m.cov[(j, j)]]]);
        Ok(([m.mean[i], m.mean[j]], sigma))
    }
}

/// Principal-axis whitening `(u, v) = W (r − μ)`, `W = Λ^{-1/2} Rᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct WhitenedFrame {
    mean: Point,
    rotation: Matrix,
    lambda: [f64; 2],
    w: Matrix,
}

impl WhitenedFrame {
    pub fn mean(&self) -> Point {
        self.mean
    }

    /// Columns are the principal axes.
    pub fn rotation(&self) -> &Matrix {
        &self.rotation
    }

    /// `λ₁ ≥ λ₂ > 0`.
    pub fn eigenvalues(&self) -> [f64; 2] {
        self.lambda
    }

    pub fn whitening(&self) -> &Matrix {
        &self.w
    }

    pub fn a(&self) -> Point {
        [self.w[(0, 0)], self.w[(0, 1)]]
    }

    pub fn b(&self) -> Point {
        [self.w[(1, 0)], self.w[(1, 1)]]
    }

    pub fn whiten_point(&self, r: Point) -> Point {
        let d = [r[0] - self.mean[0], r[1] - self.mean[1]];
        let a = self.a();
        let b = self.b();
        [a[0] * d[0] + a[1] * d[1], b[0] * d[0] + b[1] * d[1]]
    }

    /// `μ + R (u, v)`.
    pub fn from_principal(&self, u: f64, v: f64) -> Point {
        let r = &self.rotation;
        [self.mean[0] + r[(0, 0)] * u + r[(0, 1)] * v, self.mean[1] + r[(1, 0)] * u + r[(1, 1)] * v]
    }
}

/// Eigen-decomposes `sigma` with `λ₁ ≥ λ₂`; each eigenvector has its first
/// non-zero component positive, and ties keep the input-axis order.
pub fn whiten(mu: Point, sigma: &Matrix) -> Result<WhitenedFrame> {
    if sigma.rows() != 2 || sigma.cols() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: sigma.rows() });
    }
    if !sigma.is_symmetric(1e-10) {
        return Err(Error::NotPositiveDefinite);
    }
    let (values, rotation) = sigma.symmetric_eigen()?;
    if !(values[1] > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let lambda = [values[0], values[1]];
    let w = Matrix::from_fn(2, 2, |i, j| rotation[(j, i)] / lambda[i].sqrt());
    Ok(WhitenedFrame { mean: mu, rotation, lambda, w })
}

/// Scalar moments `E[U³]`, `E[U²V]`, `E[U⁴]` of the whitened slice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectedMoments {
    pub m_uuu: f64,
    pub m_uuv: f64,
    pub m_uuuu: f64,
}

impl ProjectedMoments {
    pub const GAUSSIAN: ProjectedMoments = ProjectedMoments { m_uuu: 0.0, m_uuv: 0.0, m_uuuu: 3.0 };

    /// `α = m_uuv / (m_uuuu − 1)`, or `None` when the denominator is within 10⁻⁹ of zero.
    pub fn bend(&self) -> Option<f64> {
        let d = self.m_uuuu - 1.0;
        if d.abs() <= FOURTH_MOMENT_GUARD {
            None
        } else {
            Some(self.m_uuv / d)
        }
    }

    /// `c(k) = (k² − 1)/6 · m_uuu`.
    pub fn cornish_fisher(&self, k: f64) -> f64 {
        (k * k - 1.0) / 6.0 * self.m_uuu
    }
}

/// Projects each member of a two-dimensional ensemble onto the frame axes and
/// averages `U³`, `U²V`, `U⁴` with the ensemble weights.
pub fn projected_moments(ens: &WeightedEnsemble, frame: &WhitenedFrame) -> Result<ProjectedMoments> {
    if ens.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    check_len(2, ens.dim())?;
    let mut pm = ProjectedMoments { m_uuu: 0.0, m_uuv: 0.0, m_uuuu: 0.0 };
    for (w, s) in ens.weights().iter().zip(ens.states()) {
        let [u, v] = frame.whiten_point([s[0], s[1]]);
        let u2 = u * u;
        pm.m_uuu += w * u2 * u;
        pm.m_uuv += w * u2 * v;
        pm.m_uuuu += w * u2 * u2;
    }
    Ok(pm)
}

/// Contraction of full third and fourth central-moment tensors with the frame
/// rows over the slice indices.
pub fn projected_moments_from_tensors(
    third: &SymmetricTensor,
    fourth: &SymmetricTensor,
    slice: &SliceSpec,
    frame: &WhitenedFrame,
) -> Result<ProjectedMoments> {
    slice.check(third.dim())?;
    slice.check(fourth.dim())?;
    if third.order() != 3 || fourth.order() != 4 {
        return Err(Error::invalid("expected third- and fourth-order tensors"));
    }
    let q = [slice.indices.0, slice.indices.1];
    let a = frame.a();
    let b = frame.b();
    let mut pm = ProjectedMoments { m_uuu: 0.0, m_uuv: 0.0, m_uuuu: 0.0 };
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let m3 = third.get(&[q[i], q[j], q[k]]);
                pm.m_uuu += a[i] * a[j] * a[k] * m3;
                pm.m_uuv += a[i] * a[j] * b[k] * m3;
                for l in 0..2 {
                    pm.m_uuuu += a[i] * a[j] * a[k] * a[l] * fourth.get(&[q[i], q[j], q[k], q[l]]);
                }
            }
        }
    }
    Ok(pm)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContourKind {
    Ellipse,
    Banana,
}

impl ContourKind {
    pub fn label(self) -> &'static str {
        match self {
            ContourKind::Ellipse => "ellipse",
            ContourKind::Banana => "banana",
        }
    }
}

/// Closed polyline (first point repeated at the end) sampled at uniform
/// parameters `t_i = 2π i / n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourCurve {
    points: Vec<Point>,
    k: f64,
    kind: ContourKind,
    frame: WhitenedFrame,
    /// Banana requested but the fourth moment was degenerate; the ellipse was returned.
    pub fallback: bool,
    pub self_intersecting: bool,
}

impl ContourCurve {
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn kind(&self) -> ContourKind {
        self.kind
    }

    pub fn frame(&self) -> &WhitenedFrame {
        &self.frame
    }

    /// `(t, point)` pairs, including the closing point at `t = 2π`.
    pub fn parametrized(&self) -> impl Iterator<Item = (f64, Point)> + '_ {
        let n = (self.points.len() - 1) as f64;
        self.points.iter().enumerate().map(move |(i, p)| (2.0 * PI * i as f64 / n, *p))
    }

    /// Signed shoelace area.
    pub fn area(&self) -> f64 {
        0.5 * self.points.windows(2).map(|s| s[0][0] * s[1][1] - s[1][0] * s[0][1]).sum::<f64>()
    }
}

fn trace(frame: WhitenedFrame, n_points: usize, f: impl Fn(f64) -> (f64, f64)) -> Vec<Point> {
    let mut points: Vec<Point> = (0..n_points)
        .map(|i| {
            let (u, v) = f(2.0 * PI * i as f64 / n_points as f64);
            frame.from_principal(u, v)
        })
        .collect();
    points.push(points[0]);
    points
}

fn check_scale(k: f64, n_points: usize) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::invalid("confidence scale must be positive"));
    }
    if n_points < 3 {
        return Err(Error::invalid("a contour needs at least three points"));
    }
    Ok(())
}

/// `μ + R (k√λ₁ cos t, k√λ₂ sin t)`.
pub fn gaussian_ellipse(mu: Point, sigma: &Matrix, k: f64, n_points: usize) -> Result<ContourCurve> {
    check_scale(k, n_points)?;
    let frame = whiten(mu, sigma)?;
    Ok(ellipse_in(frame, k, n_points))
}

fn ellipse_in(frame: WhitenedFrame, k: f64, n_points: usize) -> ContourCurve {
    let (s1, s2) = (frame.lambda[0].sqrt(), frame.lambda[1].sqrt());
    let points = trace(frame.clone(), n_points, |t| (k * s1 * t.cos(), k * s2 * t.sin()));
    ContourCurve { points, k, kind: ContourKind::Ellipse, frame, fallback: false, self_intersecting: false }
}

/// Ellipse perturbed by the transverse bend `α` and the Cornish–Fisher
/// long-axis term `c(k)`:
///
/// `u = k√λ₁ cos t + c√λ₁ cos² t`, `v = k√λ₂ sin t + α√λ₂ (k² cos² t − 1)`.
pub fn banana_contour(
    mu: Point,
    sigma: &Matrix,
    pm: &ProjectedMoments,
    k: f64,
    n_points: usize,
) -> Result<ContourCurve> {
    check_scale(k, n_points)?;
    let frame = whiten(mu, sigma)?;
    let Some(alpha) = pm.bend() else {
        let mut curve = ellipse_in(frame, k, n_points);
        curve.fallback = true;
        return Ok(curve);
    };
    let c = pm.cornish_fisher(k);
    let (s1, s2) = (frame.lambda[0].sqrt(), frame.lambda[1].sqrt());
    let points = trace(frame.clone(), n_points, |t| {
        let (sin, cos) = t.sin_cos();
        (k * s1 * cos + c * s1 * cos * cos, k * s2 * sin + alpha * s2 * (k * k * cos * cos - 1.0))
    });
    let self_intersecting = has_self_intersection(&points);
    Ok(ContourCurve { points, k, kind: ContourKind::Banana, frame, fallback: false, self_intersecting })
}

fn orient(p: Point, q: Point, r: Point) -> f64 {
    (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
}

fn segments_cross(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Proper crossings between non-adjacent segments of a closed polyline.
pub fn has_self_intersection(points: &[Point]) -> bool {
    let m = points.len().saturating_sub(1);
    for i in 0..m {
        let (a0, a1) = (points[i], points[i + 1]);
        let (xmin, xmax) = (a0[0].min(a1[0]), a0[0].max(a1[0]));
        let (ymin, ymax) = (a0[1].min(a1[1]), a0[1].max(a1[1]));
        for j in i + 2..m {
            if i == 0 && j == m - 1 {
                continue;
            }
            let (b0, b1) = (points[j], points[j + 1]);
            if b0[0].max(b1[0]) < xmin || b0[0].min(b1[0]) > xmax || b0[1].max(b1[1]) < ymin || b0[1].min(b1[1]) > ymax
            {
                continue;
            }
            if segments_cross(a0, a1, b0, b1) {
                return true;
            }
        }
    }
    false
}

fn on_segment(p: Point, a: Point, b: Point, tol: f64) -> bool {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let s = if len2 > 0.0 { ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let dx = ap[0] - s * ab[0];
    let dy = ap[1] - s * ab[1];
    dx * dx + dy * dy <= tol * tol
}

/// Even-odd ray casting; points on the polyline count as inside.
pub fn contains(points: &[Point], p: Point, tol: f64) -> bool {
    let mut inside = false;
    for s in points.windows(2) {
        let (a, b) = (s[0], s[1]);
        if on_segment(p, a, b, tol) {
            return true;
        }
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Fraction of `samples` inside `curve`.
pub fn coverage(curve: &ContourCurve, samples: &[Point]) -> Result<f64> {
    let pts = &curve.points;
    if pts.len() < 4 || pts.first() != pts.last() {
        return Err(Error::DegenerateCurve);
    }
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        xmin = xmin.min(p[0]);
        xmax = xmax.max(p[0]);
        ymin = ymin.min(p[1]);
        ymax = ymax.max(p[1]);
    }
    let extent = (xmax - xmin).max(ymax - ymin);
    if !(curve.area().abs() > 1e-14 * extent * extent) {
        return Err(Error::DegenerateCurve);
    }
    if samples.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let tol = 1e-12 * extent;
    let inside = samples
        .iter()
        .filter(|p| {
            p[0] >= xmin - tol && p[0] <= xmax + tol && p[1] >= ymin - tol && p[1] <= ymax + tol && contains(pts, **p, tol)
        })
        .count();
    Ok(inside as f64 / samples.len() as f64)
}
