//! Robust (ℓ1) real phase retrieval.
//!
//! The crate recovers a signal `x̄` from squared linear measurements
//! `b_i = ⟨a_i, x̄⟩²` by running the Polyak subgradient method on
//!
//! ```text
//! f_S(x) = (1/m) Σ |⟨a_i, x⟩² − b_i|
//! ```
//!
//! from a spectral initialization, and exposes closed-form machinery for the
//! Gaussian population objective `f_P(x) = E|⟨a, x⟩² − ⟨a, x̄⟩²|`: its
//! rank-two spectral representation, gradient, stationary set, Monte Carlo
//! oracles and certificates for stationary points of `f_S`.
//!
//! Modules:
//! - [`measure`]: dense Gaussian and matrix-free Hadamard-sign ensembles.
//! - [`objective`]: `f_S`, its subgradient and seeded regularity probes.
//! - [`solver`]: Polyak subgradient loop with traces and rate estimation.
//! - [`init`]: spectral initialization via shifted power iteration.
//! - [`landscape`]: population-landscape oracles and certification.
//!
//! With the default `parallel` feature, inner loops (dense products, Monte
//! Carlo sums, grid scans) run on rayon. Results do not depend on the number
//! of threads: work is split into fixed chunks whose partial results are
//! combined in index order.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod init;
pub mod landscape;
pub mod linalg;
pub mod measure;
pub mod objective;
mod par;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use measure::{MeasurementEnsemble, NoiseDistribution, NoiseModel, PhaseProblem};
pub use solver::{SolveStatus, SolveTrace, SolverConfig};
