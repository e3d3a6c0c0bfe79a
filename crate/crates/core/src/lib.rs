//! Nonlinear uncertainty quantification over truncated Taylor flow maps.
//!
//! The crate is `no_std` and only needs `alloc`. It provides
//!
//! - [`poly`]: truncated multivariate Taylor polynomials (the DA number),
//! - [`dynamics`]: CR3BP and planar aerocapture models written once over the
//!   [`Algebra`] abstraction, integrators, STM propagation and halo correction,
//! - [`flowmap`]: full and directional Taylor flow maps and their batch evaluation,
//! - [`uq`]: Monte Carlo, LinCov, UT, CUT4, PCE and GMM propagation over either
//!   direct integration or a precomputed map,
//! - [`contour`]: Gaussian ellipses, the analytic banana contour and sample coverage.
//!
//! File formats, configuration, timing and the command-line tool live in the
//! `tuq` companion crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#[cfg(test)]
extern crate std;

extern crate alloc;

pub mod algebra;
pub mod contour;
pub mod dynamics;
mod error;
pub mod flowmap;
pub mod linalg;
pub mod poly;
pub mod uq;

pub use algebra::Algebra;
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use poly::{MultiIndex, PolyContext, TruncatedPolynomial};
