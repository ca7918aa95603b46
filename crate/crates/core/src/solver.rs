//! Polyak subgradient method.
//!
//! Each step moves along the negative subgradient with length
//! `(f_S(x) − min f) / ‖ζ‖`, i.e. `x⁺ = x − (f_S(x) − min f)/‖ζ‖² · ζ`.
//! The only parameter is the minimal value, which is zero for noiseless
//! phase retrieval.

use crate::error::{check_len, Error, Result};
use crate::linalg::{dist_to_pair, norm};
use crate::measure::PhaseProblem;
use crate::objective::value_and_subgradient;

/// Default window for [`geometric_rate_estimate`].
pub const DEFAULT_RATE_WINDOW: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub min_value: f64,
    pub max_iters: usize,
    /// Stop once `f_S(x) ≤ tol_value`; disabled when zero.
    pub tol_value: f64,
    /// Stop once the relative distance to `{±x̄}` is at most this; needs truth.
    pub tol_dist: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { min_value: 0.0, max_iters: 2000, tol_value: 0.0, tol_dist: Some(1e-10) }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.min_value.is_finite() {
            return Err(Error::InvalidArgument("min_value must be finite".into()));
        }
        if !(self.tol_value >= 0.0) || self.tol_dist.is_some_and(|t| !(t >= 0.0)) {
            return Err(Error::InvalidArgument("tolerances must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIters,
    ZeroSubgradient,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Converged => "Converged",
            SolveStatus::MaxIters => "MaxIters",
            SolveStatus::ZeroSubgradient => "ZeroSubgradient",
        }
    }
}

/// State at the start of iteration `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub f_value: f64,
    pub subgrad_norm: f64,
    /// `(f_value − min_value) / subgrad_norm`, the length of the Polyak step
    /// from this iterate; zero when the subgradient vanishes.
    pub step_length: f64,
    /// `min(‖x_k − x̄‖, ‖x_k + x̄‖) / ‖x̄‖` when the truth is known and nonzero.
    pub rel_dist: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace {
    pub records: Vec<IterationRecord>,
    pub final_x: Vec<f64>,
    pub status: SolveStatus,
}

impl SolveTrace {
    pub fn final_rel_dist(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.rel_dist)
    }

    /// Number of Polyak updates performed.
    pub fn steps(&self) -> usize {
        match self.status {
            SolveStatus::MaxIters => self.records.len(),
            _ => self.records.len().saturating_sub(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Step { next: Vec<f64>, f_value: f64, subgrad_norm: f64 },
    ZeroSubgradient { f_value: f64 },
}

fn polyak_update(x: &[f64], f_value: f64, zeta: &[f64], norm_sq: f64, min_value: f64) -> Vec<f64> {
    let t = (f_value - min_value) / norm_sq;
    x.iter().zip(zeta).map(|(xi, zi)| xi - t * zi).collect()
}

pub fn polyak_step(p: &PhaseProblem, x: &[f64], min_value: f64) -> Result<StepOutcome> {
    check_len(p.d(), x.len())?;
    let (f_value, zeta) = value_and_subgradient(p, x)?;
    let norm_sq: f64 = zeta.iter().map(|z| z * z).sum();
    if norm_sq == 0.0 {
        return Ok(StepOutcome::ZeroSubgradient { f_value });
    }
    let next = polyak_update(x, f_value, &zeta, norm_sq, min_value);
    Ok(StepOutcome::Step { next, f_value, subgrad_norm: norm_sq.sqrt() })
}

fn relative_distance(x: &[f64], truth: Option<&[f64]>) -> Option<f64> {
    let t = truth?;
    let scale = norm(t);
    (scale > 0.0).then(|| dist_to_pair(x, t) / scale)
}

/// Runs Polyak steps from `x0` until a stopping rule fires.
///
/// Rules are checked at the start of every iteration in this order: value
/// tolerance, distance tolerance, zero subgradient. The record for the
/// iterate that triggers a stop is included in the trace.
pub fn run(p: &PhaseProblem, x0: &[f64], cfg: &SolverConfig) -> Result<SolveTrace> {
    check_len(p.d(), x0.len())?;
    cfg.validate()?;
    let truth = p.truth.as_deref();
    let mut x = x0.to_vec();
    let mut records = Vec::with_capacity(cfg.max_iters.min(1 << 16));
    for k in 0..cfg.max_iters {
        let (f_value, zeta) = value_and_subgradient(p, &x)?;
        let norm_sq: f64 = zeta.iter().map(|z| z * z).sum();
        if !f_value.is_finite() || !norm_sq.is_finite() {
            return Err(Error::NonFinite("polyak iteration"));
        }
        let subgrad_norm = norm_sq.sqrt();
        let step_length = if subgrad_norm > 0.0 { (f_value - cfg.min_value) / subgrad_norm } else { 0.0 };
        let rel_dist = relative_distance(&x, truth);
        records.push(IterationRecord { k, f_value, subgrad_norm, step_length, rel_dist });

        let value_reached = cfg.tol_value > 0.0 && f_value <= cfg.tol_value;
        let dist_reached = matches!((cfg.tol_dist, rel_dist), (Some(t), Some(r)) if t > 0.0 && r <= t);
        let status = if value_reached || dist_reached {
            Some(SolveStatus::Converged)
        } else if norm_sq == 0.0 {
            Some(SolveStatus::ZeroSubgradient)
        } else {
            None
        };
        if let Some(status) = status {
            return Ok(SolveTrace { records, final_x: x, status });
        }
        x = polyak_update(&x, f_value, &zeta, norm_sq, cfg.min_value);
    }
    Ok(SolveTrace { records, final_x: x, status: SolveStatus::MaxIters })
}

/// Per-step contraction factor of `rel_dist` over the last `window` steps:
/// `exp(slope)` of the least-squares line through `(k, ln rel_dist_k)`.
pub fn geometric_rate_estimate(trace: &SolveTrace, window: usize) -> Result<f64> {
    if window == 0 {
        return Err(Error::InsufficientData("window must be positive".into()));
    }
    let n = trace.records.len();
    if n < window + 1 {
        return Err(Error::InsufficientData(format!("need {} records, trace has {n}", window + 1)));
    }
    let tail = &trace.records[n - window - 1..];
    let mut logs = Vec::with_capacity(tail.len());
    for r in tail {
        match r.rel_dist {
            Some(d) if d > 0.0 && d.is_finite() => logs.push(d.ln()),
            _ => return Err(Error::InsufficientData("rel_dist must be present and positive".into())),
        }
    }
    let count = logs.len() as f64;
    let k_mean = (count - 1.0) / 2.0;
    let y_mean = logs.iter().sum::<f64>() / count;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in logs.iter().enumerate() {
        let dk = i as f64 - k_mean;
        sxy += dk * (y - y_mean);
        sxx += dk * dk;
    }
    Ok((sxy / sxx).exp())
}
