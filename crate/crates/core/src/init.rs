//! Spectral initialization.
//!
//! With `r̂² = mean(b)` and `I = {i : b_i ≤ r̂²/2}`, the initial point is
//! `x₀ = r̂ ŵ` where `ŵ` is a unit eigenvector for the smallest eigenvalue of
//! `Σ_{i∈I} a_i a_iᵀ`. Measurements with small `b_i` come from rows nearly
//! orthogonal to `x̄`, so that eigenvector aligns with `±x̄`.
//!
//! The operator is applied matrix-free as `Aᵀ(mask ⊙ Ax)` and its bottom
//! eigenvector is found by power iteration on `σI − X`.

use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, norm};
use crate::measure::{MeasurementEnsemble, PhaseProblem};
use crate::rng::{streams, SeededRng};

/// Symmetric linear operator on R^d.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>>;
}

/// Diagonal operator, mostly for tests.
#[derive(Debug, Clone)]
pub struct Diagonal(pub Vec<f64>);

impl SymmetricOperator for Diagonal {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.0.len(), x.len())?;
        Ok(self.0.iter().zip(x).map(|(d, v)| d * v).collect())
    }
}

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone)]
pub struct DenseSymmetric {
    pub n: usize,
    pub entries: Vec<f64>,
}

impl SymmetricOperator for DenseSymmetric {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, x.len())?;
        Ok(self.entries.chunks_exact(self.n).map(|row| dot(row, x)).collect())
    }
}

/// `Σ_{i selected} a_i a_iᵀ`, applied as `Aᵀ(mask ⊙ Ax)`.
pub struct SelectedGram<'a> {
    pub ensemble: &'a MeasurementEnsemble,
    pub mask: Vec<bool>,
}

impl SymmetricOperator for SelectedGram<'_> {
    fn dim(&self) -> usize {
        self.ensemble.d
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut ax = self.ensemble.apply(x)?;
        ax.iter_mut().zip(&self.mask).for_each(|(v, &keep)| {
            if !keep {
                *v = 0.0;
            }
        });
        self.ensemble.apply_adjoint(&ax)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerConfig {
    pub max_iters: usize,
    /// Relative tolerance on the Rayleigh residual `‖Xw − λ̂w‖`, scaled by
    /// `1 + λ_max` estimate.
    pub tol: f64,
    pub seed: u64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self { max_iters: 5000, tol: 1e-8, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinEigen {
    pub w: Vec<f64>,
    pub eigenvalue: f64,
    pub iters: usize,
    pub residual: f64,
    pub lambda_max_estimate: f64,
    pub converged: bool,
}

/// Iterations used to estimate `λ_max` before shifting.
const SHIFT_PROBE_ITERS: usize = 10;
const SHIFT_SAFETY: f64 = 1.1;

fn checked(v: Vec<f64>) -> Result<Vec<f64>> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(Error::NonFinite("operator output"))
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Flips `w` so that its largest-magnitude entry is nonnegative.
fn normalize_sign(w: &mut [f64]) {
    let mut best = 0;
    for (i, v) in w.iter().enumerate() {
        if v.abs() > w[best].abs() {
            best = i;
        }
    }
    if w.get(best).is_some_and(|&v| v < 0.0) {
        w.iter_mut().for_each(|x| *x = -*x);
    }
}

fn rayleigh(op: &dyn SymmetricOperator, w: &[f64]) -> Result<(f64, f64, Vec<f64>)> {
    let xw = checked(op.apply(w)?)?;
    let lambda = dot(w, &xw);
    let residual = xw.iter().zip(w).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
    Ok((lambda, residual, xw))
}

/// Unit eigenvector for the smallest eigenvalue of a positive semidefinite
/// operator, by power iteration on `σI − op`.
pub fn min_eigenvector(op: &dyn SymmetricOperator, cfg: &PowerConfig) -> Result<MinEigen> {
    let d = op.dim();
    if d == 0 {
        return Err(Error::InvalidArgument("operator dimension must be positive".into()));
    }
    let mut rng = SeededRng::new(cfg.seed, streams::POWER);
    let start = rng.unit_vector(d);

    // σ from a short power iteration on op itself.
    let mut probe = rng.unit_vector(d);
    let mut lambda_max: f64 = 0.0;
    for _ in 0..SHIFT_PROBE_ITERS {
        let mut next = checked(op.apply(&probe)?)?;
        let n = normalize(&mut next);
        lambda_max = lambda_max.max(n);
        if n == 0.0 {
            break;
        }
        probe = next;
    }
    let sigma = if lambda_max > 0.0 { SHIFT_SAFETY * lambda_max } else { 1.0 };
    let threshold = cfg.tol * (1.0 + lambda_max);

    let mut w = start;
    let (mut lambda, mut residual, mut xw) = rayleigh(op, &w)?;
    let mut iters = 0;
    while residual > threshold && iters < cfg.max_iters {
        let mut next: Vec<f64> = w.iter().zip(&xw).map(|(wi, xi)| sigma * wi - xi).collect();
        if normalize(&mut next) == 0.0 {
            break;
        }
        w = next;
        (lambda, residual, xw) = rayleigh(op, &w)?;
        iters += 1;
    }
    normalize_sign(&mut w);
    Ok(MinEigen { w, eigenvalue: lambda, iters, residual, lambda_max_estimate: lambda_max, converged: residual <= threshold })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitReport {
    pub x0: Vec<f64>,
    pub r_hat: f64,
    pub n_selected: usize,
    pub power_iters: usize,
    pub residual: f64,
    pub eigenvalue: f64,
    pub converged: bool,
}

/// Indices kept by the selection rule `b_i ≤ r̂²/2`; if none qualify, the
/// `⌈m/2⌉` smallest measurements (ties broken by index).
pub fn select_small_measurements(b: &[f64], r_hat_sq: f64) -> Vec<bool> {
    let mut mask: Vec<bool> = b.iter().map(|&v| v <= 0.5 * r_hat_sq).collect();
    if !mask.iter().any(|&k| k) {
        let mut order: Vec<usize> = (0..b.len()).collect();
        order.sort_by(|&i, &j| b[i].total_cmp(&b[j]).then(i.cmp(&j)));
        for &i in order.iter().take(b.len().div_ceil(2)) {
            mask[i] = true;
        }
    }
    mask
}

pub fn spectral_init(p: &PhaseProblem, cfg: &PowerConfig) -> Result<InitReport> {
    let m = p.m();
    let r_hat_sq = p.b.iter().sum::<f64>() / m as f64;
    if !r_hat_sq.is_finite() {
        return Err(Error::NonFinite("measurements"));
    }
    if r_hat_sq <= 0.0 {
        return Ok(InitReport {
            x0: vec![0.0; p.d()],
            r_hat: 0.0,
            n_selected: m,
            power_iters: 0,
            residual: 0.0,
            eigenvalue: 0.0,
            converged: true,
        });
    }
    let r_hat = r_hat_sq.sqrt();
    let mask = select_small_measurements(&p.b, r_hat_sq);
    let n_selected = mask.iter().filter(|&&k| k).count();
    let op = SelectedGram { ensemble: &p.ensemble, mask };
    let eig = min_eigenvector(&op, cfg)?;
    let x0 = eig.w.iter().map(|w| r_hat * w).collect();
    Ok(InitReport {
        x0,
        r_hat,
        n_selected,
        power_iters: eig.iters,
        residual: eig.residual,
        eigenvalue: eig.eigenvalue,
        converged: eig.converged,
    })
}
