//! Full and directional Taylor flow maps.
//!
//! A full map of order `j` expands every component of the final state in all `N`
//! initial deviations. A directional map carries one prioritized direction `γ̂*` to
//! order `j` and the `N − 1` transverse directions only to first order, with no
//! mixed terms: `δx₀ = γ̂* χ + L ε`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::dynamics::{integrate_fixed, FixedStep, System};
use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, norm, normalize_sign, Matrix};
use crate::poly::{PolyContext, TruncatedPolynomial, Truncation};

/// Prioritized direction and an orthonormal transverse basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionFrame {
    gamma_star: Vec<f64>,
    transverse: Matrix,
}

impl DirectionFrame {
    /// Normalizes `gamma` and completes it by Gram–Schmidt over the standard basis,
    /// taking candidate vectors in index order.
    pub fn new(gamma: &[f64]) -> Result<Self> {
        let n = gamma.len();
        let g_norm = norm(gamma);
        if n < 2 || !(g_norm > 0.0) || !g_norm.is_finite() {
            return Err(Error::invalid("direction must be a finite non-zero vector of length ≥ 2"));
        }
        let g: Vec<f64> = gamma.iter().map(|v| v / g_norm).collect();
        let mut basis: Vec<Vec<f64>> = vec![g.clone()];
        for e in 0..n {
            if basis.len() == n {
                break;
            }
            let mut v = vec![0.0; n];
            v[e] = 1.0;
            // Two passes keep the columns orthogonal to rounding level.
            for _ in 0..2 {
                for b in &basis {
                    let p = dot(&v, b);
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= p * bi;
                    }
                }
            }
            let len = norm(&v);
            if len > 1e-8 {
                basis.push(v.iter().map(|x| x / len).collect());
            }
        }
        let mut transverse = Matrix::zeros(n, n - 1);
        for (k, col) in basis[1..].iter().enumerate() {
            transverse.set_column(k, col);
        }
        Ok(DirectionFrame { gamma_star: g, transverse })
    }

    /// Frame with an explicit transverse basis (as read back from a file).
    pub fn from_parts(gamma_star: Vec<f64>, transverse: Matrix) -> Result<Self> {
        let n = gamma_star.len();
        if transverse.rows() != n || transverse.cols() + 1 != n {
            return Err(Error::DimensionMismatch { expected: n, got: transverse.rows() });
        }
        Ok(DirectionFrame { gamma_star, transverse })
    }

    pub fn dim(&self) -> usize {
        self.gamma_star.len()
    }

    pub fn gamma_star(&self) -> &[f64] {
        &self.gamma_star
    }

    /// `L`, an `N × (N − 1)` matrix.
    pub fn transverse(&self) -> &Matrix {
        &self.transverse
    }

    /// `(χ, ε) = (γ̂*ᵀδ, Lᵀδ)`.
    pub fn decompose(&self, delta: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), delta.len())?;
        let mut out = Vec::with_capacity(self.dim());
        self.decompose_into(delta, &mut out);
        Ok(out)
    }

    fn decompose_into(&self, delta: &[f64], out: &mut Vec<f64>) {
        let n = self.dim();
        out.clear();
        out.push(dot(&self.gamma_star, delta));
        for k in 0..n - 1 {
            out.push((0..n).map(|i| self.transverse[(i, k)] * delta[i]).sum());
        }
    }
}

/// Expansion kind of a [`PolyFlowMap`].
#[derive(Clone, Debug, PartialEq)]
pub enum MapKind {
    Full { order: u8 },
    Directional { order: u8, frame: DirectionFrame },
}

impl MapKind {
    pub fn order(&self) -> u8 {
        match self {
            MapKind::Full { order } | MapKind::Directional { order, .. } => *order,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            MapKind::Full { .. } => "full",
            MapKind::Directional { .. } => "directional",
        }
    }
}

/// Taylor expansion of the flow from `t0` to `tf` about a reference state.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyFlowMap {
    reference: Vec<f64>,
    t0: f64,
    tf: f64,
    kind: MapKind,
    components: Vec<TruncatedPolynomial>,
}

impl PolyFlowMap {
    pub fn reference_state(&self) -> &[f64] {
        &self.reference
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn tf(&self) -> f64 {
        self.tf
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.reference.len()
    }

    pub fn components(&self) -> &[TruncatedPolynomial] {
        &self.components
    }

    pub fn context(&self) -> &PolyContext {
        self.components[0].context()
    }

    /// Flow of the reference state (the constant parts).
    pub fn final_state(&self) -> Vec<f64> {
        self.components.iter().map(|p| p.constant_part()).collect()
    }

    /// `Φ(tf, t0)` with respect to the initial deviation `δx₀`.
    pub fn stm(&self) -> Matrix {
        let n = self.dim();
        let lin = Matrix::from_fn(n, n, |i, j| self.components[i].linear_part()[j]);
        match &self.kind {
            MapKind::Full { .. } => lin,
            MapKind::Directional { frame, .. } => {
                // [c_χ C_ε] [γ̂* L]ᵀ
                let basis = Matrix::from_fn(n, n, |i, j| {
                    if j == 0 {
                        frame.gamma_star[i]
                    } else {
                        frame.transverse[(i, j - 1)]
                    }
                });
                lin.matmul(&basis.transpose()).expect("square matrices of equal size")
            }
        }
    }

    /// Map variables for an initial deviation: `δ` itself, or `(χ, ε)`.
    pub fn map_variables(&self, delta: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), delta.len())?;
        Ok(match &self.kind {
            MapKind::Full { .. } => delta.to_vec(),
            MapKind::Directional { frame, .. } => frame.decompose(delta)?,
        })
    }

    /// Final state for the initial deviation `delta`.
    pub fn eval(&self, delta: &[f64]) -> Result<Vec<f64>> {
        let mut ws = EvalWorkspace::new(self);
        let mut out = vec![0.0; self.dim()];
        self.eval_into(delta, &mut ws, &mut out)?;
        Ok(out)
    }

    /// Evaluates many deviations in order, reusing one workspace.
    pub fn eval_batch(&self, deltas: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let mut ws = EvalWorkspace::new(self);
        deltas
            .iter()
            .map(|d| {
                let mut out = vec![0.0; self.dim()];
                self.eval_into(d, &mut ws, &mut out)?;
                Ok(out)
            })
            .collect()
    }

    /// Allocation-free evaluation into `out`.
    pub fn eval_into(&self, delta: &[f64], ws: &mut EvalWorkspace, out: &mut [f64]) -> Result<()> {
        check_len(self.dim(), delta.len())?;
        check_len(self.dim(), out.len())?;
        let ctx = self.context();
        match &self.kind {
            MapKind::Full { .. } => ctx.fill_monomial_values(delta, &mut ws.values),
            MapKind::Directional { frame, .. } => {
                frame.decompose_into(delta, &mut ws.vars);
                ctx.fill_monomial_values(&ws.vars, &mut ws.values);
            }
        }
        for (o, p) in out.iter_mut().zip(&self.components) {
            *o = p.dot_monomials(&ws.values);
        }
        Ok(())
    }

    /// Jacobian of the map at `delta` with respect to `δx₀`.
    pub fn jacobian(&self, delta: &[f64]) -> Result<Matrix> {
        let vars = self.map_variables(delta)?;
        let values = self.context().monomial_values(&vars)?;
        let n = self.dim();
        let mut jac = Matrix::zeros(n, n);
        for (i, p) in self.components.iter().enumerate() {
            let g = p.gradient_from_values(&values);
            for j in 0..n {
                jac[(i, j)] = g[j];
            }
        }
        Ok(match &self.kind {
            MapKind::Full { .. } => jac,
            MapKind::Directional { frame, .. } => {
                let mut basis_t = Matrix::zeros(n, n);
                for j in 0..n {
                    basis_t[(0, j)] = frame.gamma_star[j];
                    for k in 0..n - 1 {
                        basis_t[(k + 1, j)] = frame.transverse[(j, k)];
                    }
                }
                jac.matmul(&basis_t)?
            }
        })
    }

    /// Largest count of non-constant terms over the components.
    pub fn max_nonconstant_terms(&self) -> usize {
        self.components.iter().map(|p| p.nonconstant_term_count()).max().unwrap_or(0)
    }
}

/// Scratch buffers for repeated map evaluation.
#[derive(Clone, Debug)]
pub struct EvalWorkspace {
    values: Vec<f64>,
    vars: Vec<f64>,
}

impl EvalWorkspace {
    pub fn new(map: &PolyFlowMap) -> Self {
        EvalWorkspace { values: vec![0.0; map.context().len()], vars: Vec::with_capacity(map.dim()) }
    }
}

/// Full order-`order` Taylor map of the flow about `x_r`.
pub fn build_da_map<S: System>(
    sys: &S,
    x_r: &[f64],
    t0: f64,
    tf: f64,
    order: u8,
    step: FixedStep,
) -> Result<PolyFlowMap> {
    let n = sys.dim();
    check_len(n, x_r.len())?;
    let ctx = PolyContext::new(n, order)?;
    let x0 = x_r
        .iter()
        .enumerate()
        .map(|(i, &v)| ctx.shifted_variable(i, v))
        .collect::<Result<Vec<_>>>()?;
    let components = integrate_fixed(sys, x0, t0, tf, step)?;
    Ok(PolyFlowMap { reference: x_r.to_vec(), t0, tf, kind: MapKind::Full { order }, components })
}

/// Directional map: one propagation in the directional algebra with the initial
/// state `x_r + γ̂* χ + L ε`.
pub fn build_dda_map<S: System>(
    sys: &S,
    x_r: &[f64],
    t0: f64,
    tf: f64,
    order: u8,
    frame: &DirectionFrame,
    step: FixedStep,
) -> Result<PolyFlowMap> {
    let n = sys.dim();
    check_len(n, x_r.len())?;
    check_len(n, frame.dim())?;
    let ctx = PolyContext::directional(n, order)?;
    let vars = (0..n).map(|v| ctx.variable(v)).collect::<Result<Vec<_>>>()?;
    let x0: Vec<TruncatedPolynomial> = (0..n)
        .map(|i| {
            let mut p = vars[0].scale(frame.gamma_star[i]);
            for k in 0..n - 1 {
                p = &p + &vars[k + 1].scale(frame.transverse[(i, k)]);
            }
            p.add_constant(x_r[i])
        })
        .collect();
    let components = integrate_fixed(sys, x0, t0, tf, step)?;
    Ok(PolyFlowMap {
        reference: x_r.to_vec(),
        t0,
        tf,
        kind: MapKind::Directional { order, frame: frame.clone() },
        components,
    })
}

/// Unit eigenvector of `ΦᵀΦ` for its largest eigenvalue, first non-zero component positive.
pub fn stretching_direction(stm: &Matrix) -> Result<Vec<f64>> {
    if !stm.is_square() {
        return Err(Error::DimensionMismatch { expected: stm.rows(), got: stm.cols() });
    }
    if stm.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("state transition matrix has non-finite entries"));
    }
    let g = stm.transpose().matmul(stm)?.symmetrized();
    let (_, vectors) = g.symmetric_eigen()?;
    let mut v = vectors.column(0);
    normalize_sign(&mut v);
    Ok(v)
}

fn fmt_list(out: &mut String, label: &str, values: impl IntoIterator<Item = f64>) {
    out.push_str(label);
    for v in values {
        let _ = write!(out, " {v:e}");
    }
    out.push('\n');
}

impl PolyFlowMap {
    /// Text serialization: a header followed by one block of polynomial terms per
    /// component. Coefficients round-trip exactly.
    pub fn to_text(&self) -> String {
        let n = self.dim();
        let mut s = String::new();
        let _ = writeln!(s, "kind {}", self.kind.label());
        let _ = writeln!(s, "n {n}");
        let _ = writeln!(s, "order {}", self.kind.order());
        let _ = writeln!(s, "t0 {:e}", self.t0);
        let _ = writeln!(s, "tf {:e}", self.tf);
        fmt_list(&mut s, "reference", self.reference.iter().copied());
        if let MapKind::Directional { frame, .. } = &self.kind {
            fmt_list(&mut s, "gamma", frame.gamma_star.iter().copied());
            for k in 0..n - 1 {
                fmt_list(&mut s, "transverse", frame.transverse.column(k));
            }
        }
        for (i, p) in self.components.iter().enumerate() {
            let _ = writeln!(s, "component {i}");
            p.write_terms(&mut s);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text.lines().collect();
        let mut kind = None;
        let mut n = None;
        let mut order = None;
        let (mut t0, mut tf) = (None, None);
        let mut reference = None;
        let mut gamma = None;
        let mut transverse: Vec<Vec<f64>> = Vec::new();
        let mut i = 0;
        let perr = |line: usize, message: String| Error::Parse { line: line + 1, message };
        while i < lines.len() {
            let line = lines[i].trim();
            if line.is_empty() {
                i += 1;
                continue;
            }
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            let floats = || -> Result<Vec<f64>> {
                rest.split_whitespace()
                    .map(|t| t.parse::<f64>().map_err(|e| perr(i, format!("bad number {t:?}: {e}"))))
                    .collect()
            };
            let single = || -> Result<f64> {
                let v = floats()?;
                if v.len() == 1 {
                    Ok(v[0])
                } else {
                    Err(perr(i, format!("{key} takes one value")))
                }
            };
            match key {
                "kind" => kind = Some(String::from(rest.trim())),
                "n" => n = Some(rest.trim().parse::<usize>().map_err(|e| perr(i, format!("{e}")))?),
                "order" => order = Some(rest.trim().parse::<u8>().map_err(|e| perr(i, format!("{e}")))?),
                "t0" => t0 = Some(single()?),
                "tf" => tf = Some(single()?),
                "reference" => reference = Some(floats()?),
                "gamma" => gamma = Some(floats()?),
                "transverse" => transverse.push(floats()?),
                "component" => break,
                other => return Err(perr(i, format!("unknown header key {other:?}"))),
            }
            i += 1;
        }
        let header_end = i + 1;
        let missing = |what: &str| Error::Parse { line: header_end, message: format!("missing {what}") };
        let n = n.ok_or_else(|| missing("n"))?;
        let order = order.ok_or_else(|| missing("order"))?;
        let reference = reference.ok_or_else(|| missing("reference"))?;
        check_len(n, reference.len())?;
        let kind = match kind.as_deref() {
            Some("full") => MapKind::Full { order },
            Some("directional") => {
                let gamma = gamma.ok_or_else(|| missing("gamma"))?;
                check_len(n, gamma.len())?;
                check_len(n - 1, transverse.len())?;
                let mut l = Matrix::zeros(n, n - 1);
                for (k, col) in transverse.iter().enumerate() {
                    check_len(n, col.len())?;
                    l.set_column(k, col);
                }
                MapKind::Directional { order, frame: DirectionFrame::from_parts(gamma, l)? }
            }
            _ => return Err(missing("kind (full or directional)")),
        };
        let truncation = match kind {
            MapKind::Full { .. } => Truncation::Total,
            MapKind::Directional { .. } => Truncation::Directional,
        };
        let ctx = PolyContext::with_truncation(n, order, truncation)?;

        let mut components = Vec::with_capacity(n);
        while i < lines.len() {
            let header = lines[i].trim();
            if header.is_empty() {
                i += 1;
                continue;
            }
            let idx = header
                .strip_prefix("component ")
                .and_then(|s| s.trim().parse::<usize>().ok())
                .ok_or_else(|| perr(i, format!("expected a component header, found {header:?}")))?;
            if idx != components.len() {
                return Err(perr(i, format!("component {idx} out of order")));
            }
            let start = i + 1;
            let mut end = start;
            while end < lines.len() && !lines[end].trim_start().starts_with("component") {
                end += 1;
            }
            components.push(TruncatedPolynomial::parse_terms(&ctx, lines[start..end].iter().copied(), start + 1)?);
            i = end;
        }
        check_len(n, components.len())?;
        Ok(PolyFlowMap {
            reference,
            t0: t0.ok_or_else(|| missing("t0"))?,
            tf: tf.ok_or_else(|| missing("tf"))?,
            kind,
            components,
        })
    }
}
