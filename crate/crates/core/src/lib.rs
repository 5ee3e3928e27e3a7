//! Iterative (chained-equations) imputation with multi-chain convergence
//! diagnostics, and a Monte Carlo harness that measures how early-stopped
//! imputation affects bias, coverage, and what the diagnostics report.
//!
//! The crate is organized bottom-up:
//!
//! - [`numkit`]: numeric kernels (Cholesky, power-iteration eigenvalue,
//!   quantile functions) and addressed random streams;
//! - [`datagen`]: equicorrelated-normal data with closed-form regression
//!   truth, and MCAR amputation;
//! - [`engine`]: the chained-equations sampler with per-sweep monitoring;
//! - [`diagnostics`]: lag-k autocorrelation and rank-normalized split R-hat
//!   at arbitrary checkpoints;
//! - [`analysis`]: completed-data OLS and Rubin's-rules pooling;
//! - [`harness`]: the repetitions x conditions x checkpoints simulation loop.

// index-based loops mirror the matrix algebra they implement
#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod data;
pub mod datagen;
pub mod diagnostics;
pub mod engine;
pub mod error;
pub mod harness;
pub mod numkit;

pub use data::{DataMatrix, MissingMask};
pub use error::{Error, Result};
