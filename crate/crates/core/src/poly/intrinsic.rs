use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::TruncatedPolynomial;
use crate::error::{Error, Result};

/// Elementary functions that compose with truncated polynomials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Intrinsic {
    Reciprocal,
    Sqrt,
    InvSqrt,
    Exp,
    Ln,
    Sin,
    Cos,
    Pow(f64),
}

impl Intrinsic {
    pub fn name(self) -> &'static str {
        match self {
            Intrinsic::Reciprocal => "reciprocal",
            Intrinsic::Sqrt => "sqrt",
            Intrinsic::InvSqrt => "inv_sqrt",
            Intrinsic::Exp => "exp",
            Intrinsic::Ln => "ln",
            Intrinsic::Sin => "sin",
            Intrinsic::Cos => "cos",
            Intrinsic::Pow(_) => "pow",
        }
    }

    /// Taylor coefficients `f⁽ᵏ⁾(x₀)/k!` for `k = 0..=order`.
    pub fn taylor_coefficients(self, x0: f64, order: usize) -> Result<Vec<f64>> {
        let domain_err = || Error::Domain { intrinsic: self.name(), value: x0 };
        let mut c = Vec::with_capacity(order + 1);
        match self {
            Intrinsic::Reciprocal => {
                if x0 == 0.0 {
                    return Err(domain_err());
                }
                // 1/(x0 + d) = Σ (−d)^k / x0^(k+1)
                let inv = 1.0 / x0;
                let mut term = inv;
                for _ in 0..=order {
                    c.push(term);
                    term *= -inv;
                }
            }
            Intrinsic::Sqrt => return generalized_binomial(0.5, x0, order).ok_or_else(domain_err),
            Intrinsic::InvSqrt => return generalized_binomial(-0.5, x0, order).ok_or_else(domain_err),
            Intrinsic::Pow(a) => return generalized_binomial(a, x0, order).ok_or_else(domain_err),
            Intrinsic::Exp => {
                let e = x0.exp();
                let mut fact = 1.0;
                for k in 0..=order {
                    if k > 0 {
                        fact *= k as f64;
                    }
                    c.push(e / fact);
                }
            }
            Intrinsic::Ln => {
                if x0 <= 0.0 {
                    return Err(domain_err());
                }
                c.push(x0.ln());
                let inv = 1.0 / x0;
                let mut p = 1.0;
                for k in 1..=order {
                    p *= inv;
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    c.push(sign * p / k as f64);
                }
            }
            Intrinsic::Sin | Intrinsic::Cos => {
                let (s, co) = (x0.sin(), x0.cos());
                // Derivatives cycle sin, cos, −sin, −cos.
                let cycle = if self == Intrinsic::Sin { [s, co, -s, -co] } else { [co, -s, -co, s] };
                let mut fact = 1.0;
                for k in 0..=order {
                    if k > 0 {
                        fact *= k as f64;
                    }
                    c.push(cycle[k % 4] / fact);
                }
            }
        }
        Ok(c)
    }
}

/// Coefficients of `(x0 + d)^a = x0^a Σ C(a, k) (d/x0)^k`; `None` outside the domain.
fn generalized_binomial(a: f64, x0: f64, order: usize) -> Option<Vec<f64>> {
    let integer = a >= 0.0 && a.fract() == 0.0;
    let mut c = Vec::with_capacity(order + 1);
    if x0 == 0.0 {
        if !integer {
            return None;
        }
        // (0 + d)^a is the monomial d^a.
        for k in 0..=order {
            c.push(if k as f64 == a { 1.0 } else { 0.0 });
        }
        return Some(c);
    }
    if x0 < 0.0 && !integer {
        return None;
    }
    let base = x0.powf(a);
    let inv = 1.0 / x0;
    let mut binom = 1.0;
    let mut p = 1.0;
    for k in 0..=order {
        if k > 0 {
            binom *= (a - (k - 1) as f64) / k as f64;
            p *= inv;
        }
        c.push(base * binom * p);
    }
    Some(c)
}

/// `f(p) = Σ cₖ (p − p₀)ᵏ`, evaluated by Horner's rule in the polynomial algebra.
pub(super) fn apply(f: Intrinsic, p: &TruncatedPolynomial) -> Result<TruncatedPolynomial> {
    let order = p.context().max_order() as usize;
    let coeffs = f.taylor_coefficients(p.constant_part(), order)?;
    let dp = p.deviation();
    let mut acc = p.context().constant(coeffs[order]);
    for k in (0..order).rev() {
        acc = acc.try_mul(&dp)?.add_constant(coeffs[k]);
    }
    Ok(acc)
}
