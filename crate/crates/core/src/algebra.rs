//! Scalar abstraction shared by the dynamics: right-hand sides are written once
//! over [`Algebra`] and run on plain `f64` states or on polynomial (DA) states.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::poly::TruncatedPolynomial;

/// The operations a vector field needs from its scalar type.
///
/// Method names avoid the operator traits so that `f64` keeps its inherent
/// arithmetic unambiguous.
pub trait Algebra: Clone + core::fmt::Debug {
    /// Value at zero deviation.
    fn constant_part(&self) -> f64;
    /// A constant living in the same algebra as `self`.
    fn lift(&self, value: f64) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn scale(&self, s: f64) -> Self;
    fn shift(&self, c: f64) -> Self;
    fn try_sqrt(&self) -> Result<Self>;
    fn try_inv_sqrt(&self) -> Result<Self>;
    fn try_exp(&self) -> Result<Self>;

    /// `self + s · other`
    fn plus_scaled(&self, s: f64, other: &Self) -> Self {
        self.plus(&other.scale(s))
    }

    fn square(&self) -> Self {
        self.times(self)
    }

    /// True when the constant part is finite.
    fn is_finite(&self) -> bool {
        self.constant_part().is_finite()
    }
}

impl Algebra for f64 {
    fn constant_part(&self) -> f64 {
        *self
    }

    fn lift(&self, value: f64) -> Self {
        value
    }

    fn plus(&self, other: &Self) -> Self {
        self + other
    }

    fn minus(&self, other: &Self) -> Self {
        self - other
    }

    fn times(&self, other: &Self) -> Self {
        self * other
    }

    fn scale(&self, s: f64) -> Self {
        self * s
    }

    fn shift(&self, c: f64) -> Self {
        self + c
    }

    fn try_sqrt(&self) -> Result<Self> {
        if *self < 0.0 {
            return Err(Error::Domain { intrinsic: "sqrt", value: *self });
        }
        Ok(Float::sqrt(*self))
    }

    fn try_inv_sqrt(&self) -> Result<Self> {
        if *self <= 0.0 {
            return Err(Error::Domain { intrinsic: "inv_sqrt", value: *self });
        }
        Ok(1.0 / Float::sqrt(*self))
    }

    fn try_exp(&self) -> Result<Self> {
        Ok(Float::exp(*self))
    }

    fn plus_scaled(&self, s: f64, other: &Self) -> Self {
        self + s * other
    }
}

impl Algebra for TruncatedPolynomial {
    fn constant_part(&self) -> f64 {
        TruncatedPolynomial::constant_part(self)
    }

    fn lift(&self, value: f64) -> Self {
        self.context().constant(value)
    }

    fn plus(&self, other: &Self) -> Self {
        self + other
    }

    fn minus(&self, other: &Self) -> Self {
        self - other
    }

    fn times(&self, other: &Self) -> Self {
        self * other
    }

    fn scale(&self, s: f64) -> Self {
        TruncatedPolynomial::scale(self, s)
    }

    fn shift(&self, c: f64) -> Self {
        self.add_constant(c)
    }

    fn try_sqrt(&self) -> Result<Self> {
        self.sqrt()
    }

    fn try_inv_sqrt(&self) -> Result<Self> {
        self.inv_sqrt()
    }

    fn try_exp(&self) -> Result<Self> {
        self.exp()
    }

    fn is_finite(&self) -> bool {
        self.coefficients().iter().all(|c| c.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::PolyContext;

    fn norm_sq<T: Algebra>(v: &[T]) -> T {
        v[1..].iter().fold(v[0].square(), |acc, x| acc.plus(&x.square()))
    }

    #[test]
    fn same_code_on_both_algebras() {
        let ctx = PolyContext::new(2, 2).unwrap();
        let p = [ctx.shifted_variable(0, 3.0).unwrap(), ctx.shifted_variable(1, 4.0).unwrap()];
        let r = norm_sq(&p).try_sqrt().unwrap();
        let s = norm_sq(&[3.0, 4.0]).try_sqrt().unwrap();
        assert_eq!(r.constant_part(), s);
        assert!((r.linear_part()[0] - 0.6).abs() < 1e-15);
        assert!((r.linear_part()[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn scalar_domain_errors() {
        assert!((-1.0f64).try_sqrt().is_err());
        assert!(0.0f64.try_inv_sqrt().is_err());
        assert_eq!(4.0f64.try_inv_sqrt().unwrap(), 0.5);
    }
}
