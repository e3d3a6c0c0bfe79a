//! Truncated multivariate Taylor polynomials.
//!
//! A [`PolyContext`] fixes the number of variables, the truncation order and
//! the set of retained monomials. Two truncation rules are supported:
//!
//! - [`Truncation::Total`]: every monomial with total degree `|α| ≤ j` (full DA),
//! - [`Truncation::Directional`]: powers of the first variable up to `j` plus the
//!   remaining variables to first order with no mixed products (directional DA).
//!
//! Both retained sets are closed under taking divisors, and the dropped monomials
//! form an ideal, so truncated multiplication is a ring operation in either case.
//!
//! Coefficients are stored densely over the retained monomials of the context in
//! graded order: ascending total degree, and within one degree in descending
//! lexicographic order of the exponent tuple (`x₁²` before `x₁x₂` before `x₂²`).
//! Products use a table of monomial pairs precomputed once per context.

mod intrinsic;
mod text;

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

pub use intrinsic::Intrinsic;

use crate::error::{check_len, Error, Result};

/// Highest truncation order a context accepts.
pub const MAX_ORDER: u8 = 10;

/// Coefficients below this magnitude are zeroed after arithmetic.
pub const PRUNE_THRESHOLD: f64 = 1e-30;

/// `C(n + j, n) − 1`: number of non-constant monomials of degree at most `j` in `n` variables.
pub fn monomial_count(n_vars: usize, order: usize) -> u64 {
    // C(n + j, j) built incrementally; every partial product is an exact binomial.
    let mut c: u128 = 1;
    for i in 1..=order as u128 {
        c = c * (n_vars as u128 + i) / i;
    }
    (c - 1) as u64
}

/// Exponent tuple of a monomial.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    pub fn new(exponents: impl Into<Vec<u8>>) -> Self {
        MultiIndex(exponents.into())
    }

    pub fn zero(n_vars: usize) -> Self {
        MultiIndex(vec![0; n_vars])
    }

    /// `eᵢ`, the exponent tuple of the variable `xᵢ`.
    pub fn unit(n_vars: usize, var: usize) -> Self {
        let mut e = vec![0; n_vars];
        e[var] = 1;
        MultiIndex(e)
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total degree `|α|`.
    pub fn order(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// `α! = Π αᵢ!`, exact for `|α| ≤ 20`.
    pub fn factorial(&self) -> u64 {
        self.0.iter().map(|&e| (1..=e as u64).product::<u64>()).product()
    }

    fn checked_add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Which monomials a context retains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    /// All monomials with `|α| ≤ order`.
    Total,
    /// `x₁^k` for `k ≤ order`, plus `x₂ … x_N` to first order, no mixed terms.
    Directional,
}

impl Truncation {
    fn retains(self, alpha: &[u8], order: u8) -> bool {
        let total: usize = alpha.iter().map(|&e| e as usize).sum();
        if total > order as usize {
            return false;
        }
        match self {
            Truncation::Total => true,
            Truncation::Directional => {
                let rest: usize = alpha[1..].iter().map(|&e| e as usize).sum();
                rest == 0 || (alpha[0] == 0 && rest == 1)
            }
        }
    }
}

struct ContextData {
    n_vars: usize,
    order: u8,
    truncation: Truncation,
    monomials: Vec<MultiIndex>,
    lookup: BTreeMap<MultiIndex, u32>,
    /// Index of `eᵥ` for each variable.
    units: Vec<u32>,
    /// For monomial k > 0: (index of the monomial divided by x_var, var).
    parent: Vec<(u32, u8)>,
    /// `lower[k * n + v]` = index of α_k − e_v, or `u32::MAX`.
    lower: Vec<u32>,
    /// Products with the monomial `i` live in `pairs[pair_start[i]..pair_start[i + 1]]`
    /// as (partner index, product index).
    pair_start: Vec<u32>,
    pairs: Vec<(u32, u32)>,
}

/// Shared description of a truncated polynomial algebra.
#[derive(Clone)]
pub struct PolyContext(Arc<ContextData>);

impl PolyContext {
    /// Full truncation: every monomial of total degree at most `max_order`.
    pub fn new(n_vars: usize, max_order: u8) -> Result<Self> {
        Self::with_truncation(n_vars, max_order, Truncation::Total)
    }

    /// Directional truncation: variable 0 carried to `max_order`, the others to first order.
    pub fn directional(n_vars: usize, max_order: u8) -> Result<Self> {
        Self::with_truncation(n_vars, max_order, Truncation::Directional)
    }

    pub fn with_truncation(n_vars: usize, max_order: u8, truncation: Truncation) -> Result<Self> {
        if n_vars == 0 {
            return Err(Error::invalid("a polynomial context needs at least one variable"));
        }
        if max_order == 0 || max_order > MAX_ORDER {
            return Err(Error::invalid(alloc::format!(
                "truncation order must lie in 1..={MAX_ORDER}, got {max_order}"
            )));
        }
        if n_vars > u8::MAX as usize {
            return Err(Error::invalid("too many variables"));
        }

        let mut monomials = Vec::new();
        let mut current = vec![0u8; n_vars];
        enumerate(&mut current, 0, max_order, &mut |alpha| {
            if truncation.retains(alpha, max_order) {
                monomials.push(MultiIndex::new(alpha.to_vec()));
            }
        });
        monomials.sort();

        let lookup: BTreeMap<MultiIndex, u32> =
            monomials.iter().enumerate().map(|(i, m)| (m.clone(), i as u32)).collect();

        let mut parent = vec![(0u32, 0u8); monomials.len()];
        let mut lower = vec![u32::MAX; monomials.len() * n_vars];
        for (k, alpha) in monomials.iter().enumerate() {
            for v in 0..n_vars {
                if alpha.0[v] > 0 {
                    let mut reduced = alpha.0.clone();
                    reduced[v] -= 1;
                    lower[k * n_vars + v] = lookup[&MultiIndex(reduced)];
                }
            }
            if k > 0 {
                let v = alpha.0.iter().position(|&e| e > 0).expect("non-constant monomial");
                parent[k] = (lower[k * n_vars + v], v as u8);
            }
        }

        let units = (0..n_vars).map(|v| lookup[&MultiIndex::unit(n_vars, v)]).collect();

        let mut pair_start = Vec::with_capacity(monomials.len() + 1);
        let mut pairs = Vec::new();
        for a in &monomials {
            pair_start.push(pairs.len() as u32);
            let room = max_order as usize - a.order();
            for (j, b) in monomials.iter().enumerate() {
                if b.order() > room {
                    break;
                }
                if let Some(&k) = lookup.get(&a.checked_add(b)) {
                    pairs.push((j as u32, k));
                }
            }
        }
        pair_start.push(pairs.len() as u32);

        Ok(PolyContext(Arc::new(ContextData {
            n_vars,
            order: max_order,
            truncation,
            monomials,
            lookup,
            units,
            parent,
            lower,
            pair_start,
            pairs,
        })))
    }

    pub fn n_vars(&self) -> usize {
        self.0.n_vars
    }

    pub fn max_order(&self) -> u8 {
        self.0.order
    }

    pub fn truncation(&self) -> Truncation {
        self.0.truncation
    }

    /// Number of retained monomials, constant included.
    pub fn len(&self) -> usize {
        self.0.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Retained monomials in canonical graded order.
    pub fn monomials(&self) -> &[MultiIndex] {
        &self.0.monomials
    }

    pub fn index_of(&self, alpha: &MultiIndex) -> Option<usize> {
        self.0.lookup.get(alpha).map(|&i| i as usize)
    }

    /// True when polynomials of both contexts can be combined.
    pub fn is_compatible(&self, other: &PolyContext) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.n_vars == other.0.n_vars
                && self.0.order == other.0.order
                && self.0.truncation == other.0.truncation)
    }

    pub fn zero(&self) -> TruncatedPolynomial {
        TruncatedPolynomial { ctx: self.clone(), coeffs: vec![0.0; self.len()] }
    }

    pub fn constant(&self, value: f64) -> TruncatedPolynomial {
        let mut p = self.zero();
        p.coeffs[0] = value;
        p
    }

    /// The independent variable `xᵢ` (zero constant part).
    pub fn variable(&self, var: usize) -> Result<TruncatedPolynomial> {
        if var >= self.n_vars() {
            return Err(Error::DimensionMismatch { expected: self.n_vars(), got: var + 1 });
        }
        let mut p = self.zero();
        p.coeffs[self.unit_index(var)] = 1.0;
        Ok(p)
    }

    /// `value + xᵢ`.
    pub fn shifted_variable(&self, var: usize, value: f64) -> Result<TruncatedPolynomial> {
        let mut p = self.variable(var)?;
        p.coeffs[0] = value;
        Ok(p)
    }

    fn unit_index(&self, var: usize) -> usize {
        self.0.units[var] as usize
    }

    /// Powers `point^α` for every retained monomial, in canonical order.
    pub fn monomial_values(&self, point: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n_vars(), point.len())?;
        let mut values = vec![0.0; self.len()];
        self.fill_monomial_values(point, &mut values);
        Ok(values)
    }

    pub(crate) fn fill_monomial_values(&self, point: &[f64], values: &mut [f64]) {
        values[0] = 1.0;
        for k in 1..values.len() {
            let (p, v) = self.0.parent[k];
            values[k] = values[p as usize] * point[v as usize];
        }
    }
}

impl fmt::Debug for PolyContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolyContext")
            .field("n_vars", &self.0.n_vars)
            .field("max_order", &self.0.order)
            .field("truncation", &self.0.truncation)
            .field("monomials", &self.0.monomials.len())
            .finish()
    }
}

fn enumerate(current: &mut [u8], var: usize, budget: u8, visit: &mut impl FnMut(&[u8])) {
    if var == current.len() {
        visit(current);
        return;
    }
    for e in 0..=budget {
        current[var] = e;
        enumerate(current, var + 1, budget - e, visit);
    }
    current[var] = 0;
}

/// A polynomial over a [`PolyContext`], truncated at the context's order.
#[derive(Clone)]
pub struct TruncatedPolynomial {
    ctx: PolyContext,
    coeffs: Vec<f64>,
}

impl TruncatedPolynomial {
    /// Builds a polynomial from `(α, coefficient)` terms; repeated indices accumulate.
    pub fn from_terms(
        ctx: &PolyContext,
        terms: impl IntoIterator<Item = (MultiIndex, f64)>,
    ) -> Result<Self> {
        let mut p = ctx.zero();
        for (alpha, c) in terms {
            check_len(ctx.n_vars(), alpha.len())?;
            let idx = ctx.index_of(&alpha).ok_or_else(|| {
                Error::invalid(alloc::format!("monomial {alpha:?} is not retained by the context"))
            })?;
            p.coeffs[idx] += c;
        }
        p.prune();
        Ok(p)
    }

    pub(crate) fn from_dense(ctx: &PolyContext, coeffs: Vec<f64>) -> Self {
        debug_assert_eq!(coeffs.len(), ctx.len());
        let mut p = TruncatedPolynomial { ctx: ctx.clone(), coeffs };
        p.prune();
        p
    }

    pub fn context(&self) -> &PolyContext {
        &self.ctx
    }

    /// Dense coefficients over the context's monomials, canonical order.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> f64 {
        self.ctx.index_of(alpha).map_or(0.0, |i| self.coeffs[i])
    }

    pub fn constant_part(&self) -> f64 {
        self.coeffs[0]
    }

    /// Coefficients of `x₁ … x_N`.
    pub fn linear_part(&self) -> Vec<f64> {
        (0..self.ctx.n_vars()).map(|v| self.coeffs[self.ctx.unit_index(v)]).collect()
    }

    /// Non-zero terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> + '_ {
        self.ctx
            .monomials()
            .iter()
            .zip(self.coeffs.iter().copied())
            .filter(|(_, c)| *c != 0.0)
    }

    pub fn nonconstant_term_count(&self) -> usize {
        self.coeffs[1..].iter().filter(|c| **c != 0.0).count()
    }

    fn prune(&mut self) {
        for c in &mut self.coeffs {
            if c.abs() < PRUNE_THRESHOLD {
                *c = 0.0;
            }
        }
    }

    fn check_context(&self, other: &TruncatedPolynomial) -> Result<()> {
        if self.ctx.is_compatible(&other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn try_add(&self, other: &TruncatedPolynomial) -> Result<Self> {
        self.check_context(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self::from_dense(&self.ctx, coeffs))
    }

    pub fn try_sub(&self, other: &TruncatedPolynomial) -> Result<Self> {
        self.check_context(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self::from_dense(&self.ctx, coeffs))
    }

    /// Truncated product; terms beyond the context's retained set are discarded.
    pub fn try_mul(&self, other: &TruncatedPolynomial) -> Result<Self> {
        self.check_context(other)?;
        let data = &self.ctx.0;
        let mut out = vec![0.0; self.coeffs.len()];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let range = data.pair_start[i] as usize..data.pair_start[i + 1] as usize;
            for &(j, k) in &data.pairs[range] {
                out[k as usize] += a * other.coeffs[j as usize];
            }
        }
        Ok(Self::from_dense(&self.ctx, out))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_dense(&self.ctx, self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add_constant(&self, c: f64) -> Self {
        let mut p = self.clone();
        p.coeffs[0] += c;
        p
    }

    /// Same polynomial with its constant part removed.
    pub fn deviation(&self) -> Self {
        let mut p = self.clone();
        p.coeffs[0] = 0.0;
        p
    }

    /// `Σ coeff(α) point^α`, summed in canonical order.
    pub fn evaluate(&self, point: &[f64]) -> Result<f64> {
        let values = self.ctx.monomial_values(point)?;
        Ok(self.dot_monomials(&values))
    }

    pub(crate) fn dot_monomials(&self, values: &[f64]) -> f64 {
        self.coeffs.iter().zip(values).map(|(c, m)| c * m).sum()
    }

    /// Gradient with respect to the context variables at `point`.
    pub fn gradient(&self, point: &[f64]) -> Result<Vec<f64>> {
        let values = self.ctx.monomial_values(point)?;
        Ok(self.gradient_from_values(&values))
    }

    pub(crate) fn gradient_from_values(&self, values: &[f64]) -> Vec<f64> {
        let n = self.ctx.n_vars();
        let data = &self.ctx.0;
        let mut grad = vec![0.0; n];
        for (k, &c) in self.coeffs.iter().enumerate().skip(1) {
            if c == 0.0 {
                continue;
            }
            let alpha = &data.monomials[k].0;
            for v in 0..n {
                if alpha[v] > 0 {
                    grad[v] += c * alpha[v] as f64 * values[data.lower[k * n + v] as usize];
                }
            }
        }
        grad
    }

    /// Substitutes `subs[i]` for variable `i`; the result lives in the context of `subs`.
    ///
    /// Substitutions are expected to have zero constant part unless
    /// `allow_constant_shift` is set.
    pub fn compose(&self, subs: &[TruncatedPolynomial], allow_constant_shift: bool) -> Result<Self> {
        check_len(self.ctx.n_vars(), subs.len())?;
        let target = subs
            .first()
            .map(|s| s.ctx.clone())
            .ok_or(Error::DimensionMismatch { expected: self.ctx.n_vars(), got: 0 })?;
        for s in subs {
            if !s.ctx.is_compatible(&target) {
                return Err(Error::ContextMismatch);
            }
            if !allow_constant_shift && s.constant_part() != 0.0 {
                return Err(Error::invalid(
                    "substitution has a constant part; pass allow_constant_shift to permit it",
                ));
            }
        }
        let data = &self.ctx.0;
        let mut powers: Vec<TruncatedPolynomial> = Vec::with_capacity(self.ctx.len());
        powers.push(target.constant(1.0));
        let mut acc = vec![0.0; target.len()];
        acc[0] = self.coeffs[0];
        for k in 1..self.ctx.len() {
            let (p, v) = data.parent[k];
            let value = powers[p as usize].try_mul(&subs[v as usize])?;
            let c = self.coeffs[k];
            if c != 0.0 {
                for (a, m) in acc.iter_mut().zip(&value.coeffs) {
                    *a += c * m;
                }
            }
            powers.push(value);
        }
        Ok(Self::from_dense(&target, acc))
    }

    /// Applies one of the supported elementary functions.
    pub fn intrinsic(&self, f: Intrinsic) -> Result<Self> {
        intrinsic::apply(f, self)
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.intrinsic(Intrinsic::Sqrt)
    }

    pub fn inv_sqrt(&self) -> Result<Self> {
        self.intrinsic(Intrinsic::InvSqrt)
    }

    pub fn recip(&self) -> Result<Self> {
        self.intrinsic(Intrinsic::Reciprocal)
    }

    pub fn exp(&self) -> Result<Self> {
        self.intrinsic(Intrinsic::Exp)
    }

    pub fn ln(&self) -> Result<Self> {
        self.intrinsic(Intrinsic::Ln)
    }

    pub fn sin(&self) -> Result<Self> {
        self.intrinsic(Intrinsic::Sin)
    }

    pub fn cos(&self) -> Result<Self> {
        self.intrinsic(Intrinsic::Cos)
    }

    pub fn powf(&self, exponent: f64) -> Result<Self> {
        self.intrinsic(Intrinsic::Pow(exponent))
    }
}

impl fmt::Debug for TruncatedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms()).finish()
    }
}

impl PartialEq for TruncatedPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.is_compatible(&other.ctx) && self.coeffs == other.coeffs
    }
}

// Operator forms panic on context mismatch; the `try_*` methods report it instead.
macro_rules! binary_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for TruncatedPolynomial {
            type Output = TruncatedPolynomial;
            fn $method(self, rhs: TruncatedPolynomial) -> TruncatedPolynomial {
                self.$checked(&rhs).expect("polynomial context mismatch")
            }
        }

        impl<'a> $trait<&'a TruncatedPolynomial> for &'a TruncatedPolynomial {
            type Output = TruncatedPolynomial;
            fn $method(self, rhs: &'a TruncatedPolynomial) -> TruncatedPolynomial {
                self.$checked(rhs).expect("polynomial context mismatch")
            }
        }
    };
}

binary_op!(Add, add, try_add);
binary_op!(Sub, sub, try_sub);
binary_op!(Mul, mul, try_mul);

impl Neg for TruncatedPolynomial {
    type Output = TruncatedPolynomial;
    fn neg(self) -> TruncatedPolynomial {
        self.scale(-1.0)
    }
}

impl Add<f64> for TruncatedPolynomial {
    type Output = TruncatedPolynomial;
    fn add(mut self, rhs: f64) -> TruncatedPolynomial {
        self.coeffs[0] += rhs;
        self
    }
}

impl Sub<f64> for TruncatedPolynomial {
    type Output = TruncatedPolynomial;
    fn sub(mut self, rhs: f64) -> TruncatedPolynomial {
        self.coeffs[0] -= rhs;
        self
    }
}

impl Mul<f64> for TruncatedPolynomial {
    type Output = TruncatedPolynomial;
    fn mul(self, rhs: f64) -> TruncatedPolynomial {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(e: &[u8]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomial_count(6, 3), 83);
        assert_eq!(monomial_count(2, 2), 5);
        for j in 0..8 {
            assert_eq!(monomial_count(1, j), j as u64);
        }
        let ctx = PolyContext::new(6, 3).unwrap();
        assert_eq!(ctx.len() - 1, 83);
    }

    #[test]
    fn graded_order() {
        let ctx = PolyContext::new(2, 2).unwrap();
        let order: Vec<Vec<u8>> = ctx.monomials().iter().map(|m| m.exponents().to_vec()).collect();
        assert_eq!(order, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn directional_context_terms() {
        let ctx = PolyContext::directional(6, 3).unwrap();
        // 1, χ, χ², χ³ and ε₁…ε₅.
        assert_eq!(ctx.len(), 9);
        assert_eq!(ctx.len() - 1, 6 + 3 - 1);
        let chi = ctx.variable(0).unwrap();
        let eps = ctx.variable(1).unwrap();
        assert_eq!((&chi * &eps).nonconstant_term_count(), 0);
        assert_eq!((&eps * &eps).nonconstant_term_count(), 0);
        assert_eq!((&(&chi * &chi) * &chi).coefficient(&idx(&[3, 0, 0, 0, 0, 0])), 1.0);
    }

    #[test]
    fn cancellation_and_identity() {
        let ctx = PolyContext::new(2, 2).unwrap();
        let x = ctx.variable(0).unwrap();
        let p = x.clone() + 1.0;
        let q = ctx.constant(2.0) - x;
        let sum = p.try_add(&q).unwrap();
        assert_eq!(sum, ctx.constant(3.0));
        assert_eq!(p.try_add(&ctx.zero()).unwrap(), p);
    }

    #[test]
    fn product_truncates() {
        let ctx = PolyContext::new(1, 2).unwrap();
        let x = ctx.variable(0).unwrap();
        let prod = (x.clone() + 1.0) * (ctx.constant(1.0) - x);
        assert_eq!(prod.coefficient(&idx(&[0])), 1.0);
        assert_eq!(prod.coefficient(&idx(&[1])), 0.0);
        assert_eq!(prod.coefficient(&idx(&[2])), -1.0);

        let ctx1 = PolyContext::new(1, 1).unwrap();
        let x = ctx1.variable(0).unwrap();
        assert_eq!(&x * &x, ctx1.zero());
    }

    #[test]
    fn context_mismatch_is_reported() {
        let a = PolyContext::new(2, 2).unwrap().constant(1.0);
        let b = PolyContext::new(2, 3).unwrap().constant(1.0);
        assert_eq!(a.try_add(&b).unwrap_err(), Error::ContextMismatch);
        assert_eq!(a.try_mul(&b).unwrap_err(), Error::ContextMismatch);
    }

    #[test]
    fn context_limits() {
        assert!(PolyContext::new(0, 3).is_err());
        assert!(PolyContext::new(2, 0).is_err());
        assert!(PolyContext::new(2, MAX_ORDER + 1).is_err());
    }

    #[test]
    fn evaluate_by_hand() {
        let ctx = PolyContext::new(2, 2).unwrap();
        let p = TruncatedPolynomial::from_terms(
            &ctx,
            [(idx(&[0, 0]), 1.0), (idx(&[1, 0]), 2.0), (idx(&[0, 2]), 3.0)],
        )
        .unwrap();
        assert_eq!(p.evaluate(&[1.0, 2.0]).unwrap(), 15.0);
        assert_eq!(p.evaluate(&[0.0, 0.0]).unwrap(), p.constant_part());
        assert!(matches!(p.evaluate(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn compose_square_of_sum() {
        let ctx = PolyContext::new(2, 2).unwrap();
        let x1 = ctx.variable(0).unwrap();
        let x2 = ctx.variable(1).unwrap();
        let p = &x1 * &x1;
        let r = p.compose(&[&x1 + &x2, x2.clone()], false).unwrap();
        assert_eq!(r.coefficient(&idx(&[2, 0])), 1.0);
        assert_eq!(r.coefficient(&idx(&[1, 1])), 2.0);
        assert_eq!(r.coefficient(&idx(&[0, 2])), 1.0);

        let ident = p.compose(&[x1.clone(), x2.clone()], false).unwrap();
        assert_eq!(ident, p);
        assert!(p.compose(std::slice::from_ref(&x1), false).is_err());
        assert!(p.compose(&[x1 + 1.0, x2], false).is_err());
    }

    #[test]
    fn gradient_of_quadratic() {
        let ctx = PolyContext::new(2, 3).unwrap();
        let x = ctx.variable(0).unwrap();
        let y = ctx.variable(1).unwrap();
        // p = x²y + 3y
        let p = &(&x * &x) * &y + y.scale(3.0);
        let g = p.gradient(&[2.0, -1.0]).unwrap();
        assert_eq!(g, vec![-4.0, 7.0]);
    }

    #[test]
    fn pruning_drops_dust() {
        let ctx = PolyContext::new(1, 2).unwrap();
        let p = ctx.variable(0).unwrap().scale(1e-31);
        assert_eq!(p.nonconstant_term_count(), 0);
    }

    #[test]
    fn factorial_of_index() {
        assert_eq!(idx(&[3, 2, 0]).factorial(), 12);
        assert_eq!(idx(&[12]).factorial(), 479_001_600);
        assert_eq!(idx(&[2, 1]).order(), 3);
    }
}
