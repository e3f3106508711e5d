//! Exact Gaussian simulation, covariance evaluation and wave-speed inference for
//! the stochastic wave equation `∂²u = ϑΔu + Ẇ` driven by Riesz-kernel noise.
//!
//! Modules, bottom-up:
//! - [`increments`]: discrete increment calculus and its closed-form identities.
//! - [`specfun`]: oscillatory quadrature, radial reductions, Fejér kernels, asymptotic constants.
//! - [`covariance`]: process-level and increment-level covariances.
//! - [`sampler`]: Cholesky factorization and reproducible Gaussian draws.
//! - [`inference`]: variations, moment estimators, confidence intervals, MLE, Hellinger distance.
//! - [`harness`]: seeded Monte Carlo experiments.
//! - [`cli`]: command-line front end.

// `!(x > 0.0)` is used deliberately so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod covariance;
pub mod error;
pub mod harness;
pub mod increments;
pub mod inference;
pub mod model;
pub mod sampler;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};
pub use model::{ModelParams, NoiseProfile, SamplingDesign};
