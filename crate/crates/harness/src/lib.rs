//! Experiment driver for the `robustpr` solver: simulated convergence
//! studies, population landscape grids, certification of candidate points,
//! image recovery from Hadamard sketches and regularity probes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod io;
pub mod netpbm;

pub use config::{Command, ExperimentConfig};
pub use error::{HarnessError, Result};
