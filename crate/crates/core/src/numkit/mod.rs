//! Deterministic numeric kernels and random-variate generation. Everything
//! else in the crate is built on this module; it has no opinions about
//! imputation.

pub mod matrix;
pub mod rng;
pub mod special;
pub mod stats;

pub use matrix::{covariance_matrix, SquareMatrix};
pub use rng::{draw_mvn, Purpose, RngStream, StreamId};
pub use special::{incomplete_beta, ln_gamma, normal_quantile, t_cdf, t_quantile};
pub use stats::{midranks, spearman_rho};

/// Default relative tolerance for the power-iteration eigenvalue.
pub const EIGEN_TOL: f64 = 1e-9;
/// Default iteration cap for the power-iteration eigenvalue.
pub const EIGEN_MAX_ITER: usize = 10_000;
