//! Scenario files, end-to-end study runners, timing sweeps and report export
//! on top of [`tuq_core`].
//!
//! The `tuq` binary wraps these as the `run`, `map`, `contour` and `bench`
//! subcommands.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod config;
mod error;
pub mod io;
pub mod report;
pub mod study;

pub use error::{Result, StageExt, TuqError};
pub use tuq_core as core;
