//! The robust objective `f_S(x) = (1/m) Σ |⟨a_i, x⟩² − b_i|`, its
//! chain-rule subgradient, and seeded probes of its regularity constants.
//!
//! The probes report extremes over finite seeded samples. They are
//! statistical evidence for weak convexity, sharpness and concentration, not
//! certificates.

use std::f64::consts::PI;

use crate::error::{check_len, Error, Result};
use crate::linalg::{compensated_sum, dist, dist_neg, dot, norm, sub};
use crate::measure::{EnsembleKind, MeasurementEnsemble, PhaseProblem};
use crate::rng::{streams, SeededRng};

/// Above this many measurements, `value` uses compensated summation.
pub const COMPENSATED_SUM_THRESHOLD: usize = 100_000;

/// Empirical regularity constants from a probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularityEstimate {
    /// Largest observed violation of the convex subgradient inequality,
    /// expressed as a curvature `2(f(x) + ⟨ζ, y − x⟩ − f(y)) / ‖y − x‖²`.
    pub rho_hat: f64,
    /// Smallest observed `f_S(x) / (‖x − x̄‖ ‖x + x̄‖)`.
    pub kappa_hat: f64,
    pub samples: usize,
    pub seed: u64,
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn value_from_products(p: &PhaseProblem, ax: &[f64]) -> f64 {
    let terms = ax.iter().zip(&p.b).map(|(v, b)| (v * v - b).abs());
    let total = if ax.len() > COMPENSATED_SUM_THRESHOLD {
        compensated_sum(terms)
    } else {
        terms.sum()
    };
    total / p.m() as f64
}

pub fn value(p: &PhaseProblem, x: &[f64]) -> Result<f64> {
    check_len(p.d(), x.len())?;
    let ax = p.ensemble.apply(x)?;
    Ok(value_from_products(p, &ax))
}

/// `(2/m) Aᵀ(s ⊙ Ax)` with `s_i = sign((Ax)_i² − b_i)` and `sign(0) = 0`.
pub fn subgradient(p: &PhaseProblem, x: &[f64]) -> Result<Vec<f64>> {
    Ok(value_and_subgradient(p, x)?.1)
}

/// Objective value and subgradient from a single forward product.
pub fn value_and_subgradient(p: &PhaseProblem, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_len(p.d(), x.len())?;
    let ax = p.ensemble.apply(x)?;
    let f = value_from_products(p, &ax);
    let scale = 2.0 / p.m() as f64;
    let weighted: Vec<f64> = ax.iter().zip(&p.b).map(|(v, b)| scale * sign(v * v - b) * v).collect();
    let g = p.ensemble.apply_adjoint(&weighted)?;
    Ok((f, g))
}

/// Largest empirical weak-convexity modulus over `n_triples` pairs drawn
/// uniformly from the ball of radius `radius·‖x̄‖` around `x̄`.
pub fn weak_convexity_probe(p: &PhaseProblem, n_triples: usize, radius: f64, seed: u64) -> Result<RegularityEstimate> {
    let truth = p.truth()?;
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    let r = radius * norm(truth);
    let mut rng = SeededRng::new(seed, streams::PROBE);
    let mut rho_hat: f64 = 0.0;
    for _ in 0..n_triples {
        let x = rng.in_ball(truth, r);
        let y = rng.in_ball(truth, r);
        let step = sub(&y, &x);
        let step_sq = dot(&step, &step);
        if step_sq == 0.0 {
            continue;
        }
        let (fx, zx) = value_and_subgradient(p, &x)?;
        let fy = value(p, &y)?;
        let violation = 2.0 * (fx + dot(&zx, &step) - fy) / step_sq;
        rho_hat = rho_hat.max(violation);
    }
    Ok(RegularityEstimate { rho_hat, kappa_hat: f64::INFINITY, samples: n_triples, seed })
}

/// Sample points for the sharpness probe: half local perturbations
/// `±x̄ + r·u` with `r ~ U(0, ‖x̄‖)`, half global points `t·u` with
/// `t ~ U(0, 3‖x̄‖)`, `u` a uniform unit direction.
fn sharpness_point(rng: &mut SeededRng, truth: &[f64], scale: f64, local: bool) -> Vec<f64> {
    let u = rng.unit_vector(truth.len());
    if local {
        let s = rng.sign();
        let r = scale * rng.uniform_open();
        truth.iter().zip(&u).map(|(t, ui)| s * t + r * ui).collect()
    } else {
        let t = 3.0 * scale * rng.uniform_open();
        u.iter().map(|ui| t * ui).collect()
    }
}

/// Smallest observed sharpness ratio `f_S(x) / (‖x − x̄‖ ‖x + x̄‖)`.
pub fn sharpness_probe(p: &PhaseProblem, n_points: usize, seed: u64) -> Result<RegularityEstimate> {
    let truth = p.truth()?;
    if !p.is_noiseless() {
        return Err(Error::InvalidArgument("sharpness probe requires noiseless measurements".into()));
    }
    let scale = norm(truth);
    let mut rng = SeededRng::new(seed, streams::PROBE);
    let mut kappa_hat = f64::INFINITY;
    let mut taken = 0;
    while taken < n_points {
        let x = sharpness_point(&mut rng, truth, scale, taken % 2 == 0);
        let product = dist(&x, truth) * dist_neg(&x, truth);
        if product == 0.0 {
            continue;
        }
        kappa_hat = kappa_hat.min(value(p, &x)? / product);
        taken += 1;
    }
    Ok(RegularityEstimate { rho_hat: 0.0, kappa_hat, samples: n_points, seed })
}

/// `E|⟨a, v⟩⟨a, w⟩|` for `a ~ N(0, I)` and unit `v, w` with `⟨v, w⟩ = t`.
pub fn abs_product_mean(t: f64) -> f64 {
    let t = t.clamp(-1.0, 1.0);
    2.0 / PI * ((1.0 - t * t).sqrt() + t * t.asin())
}

/// Largest deviation of `(1/m) Σ |⟨a_i, v⟩⟨a_i, w⟩|` from its Gaussian mean
/// over `n_pairs` seeded pairs of unit vectors.
pub fn concentration_probe(e: &MeasurementEnsemble, n_pairs: usize, seed: u64) -> Result<f64> {
    if !matches!(e.kind, EnsembleKind::DenseGaussian { .. }) {
        return Err(Error::UnsupportedEnsemble("hadamard"));
    }
    let mut rng = SeededRng::new(seed, streams::PROBE);
    let mut worst: f64 = 0.0;
    for _ in 0..n_pairs {
        let v = rng.unit_vector(e.d);
        let w = rng.unit_vector(e.d);
        let av = e.apply(&v)?;
        let aw = e.apply(&w)?;
        let empirical = av.iter().zip(&aw).map(|(a, b)| (a * b).abs()).sum::<f64>() / e.m as f64;
        worst = worst.max((empirical - abs_product_mean(dot(&v, &w))).abs());
    }
    Ok(worst)
}

/// Minimizer over `t ≥ 0` of `t ↦ f_S(t·u)` for a unit direction `u`.
///
/// With `s_i = ⟨a_i, u⟩²` the restriction is `(1/m) Σ |t² s_i − b_i|`, so
/// `t*²` is a weighted median of `b_i / s_i` with weights `s_i`. Taking `u`
/// orthogonal to `x̄` gives the empirical counterpart of the ring radius.
pub fn radial_stationary_point(p: &PhaseProblem, u: &[f64]) -> Result<f64> {
    check_len(p.d(), u.len())?;
    let nu = norm(u);
    if !(nu > 0.0) {
        return Err(Error::InvalidArgument("direction must be nonzero".into()));
    }
    let unit: Vec<f64> = u.iter().map(|v| v / nu).collect();
    let au = p.ensemble.apply(&unit)?;
    let mut pairs: Vec<(f64, f64)> =
        au.iter().zip(&p.b).filter(|(a, _)| **a != 0.0).map(|(a, b)| (b / (a * a), a * a)).collect();
    if pairs.is_empty() {
        return Ok(0.0);
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let total: f64 = pairs.iter().map(|q| q.1).sum();
    let mut acc = 0.0;
    for (ratio, w) in &pairs {
        acc += w;
        if acc >= 0.5 * total {
            return Ok(ratio.max(0.0).sqrt());
        }
    }
    Ok(pairs[pairs.len() - 1].0.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{dense_ensemble, gaussian_ensemble, gaussian_signal, measure};

    fn scalar_problem(b: f64) -> PhaseProblem {
        let e = dense_ensemble(vec![vec![1.0]]).unwrap();
        PhaseProblem { ensemble: e, b: vec![b], truth: Some(vec![b.sqrt()]), noise: None }
    }

    #[test]
    fn scalar_value_and_subgradient() {
        let p = scalar_problem(1.0);
        assert_eq!(value(&p, &[2.0]).unwrap(), 3.0);
        assert_eq!(subgradient(&p, &[2.0]).unwrap(), vec![4.0]);
        assert_eq!(subgradient(&p, &[0.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn zero_at_truth_and_its_negation() {
        let e = gaussian_ensemble(6, 30, 3).unwrap();
        let x = gaussian_signal(6, 4);
        let p = measure(&e, &x, None).unwrap();
        assert_eq!(value(&p, &x).unwrap(), 0.0);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_eq!(value(&p, &neg).unwrap(), 0.0);
        assert!(subgradient(&p, &x).unwrap().iter().all(|&g| g == 0.0));
        assert!(matches!(value(&p, &[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn convex_instance_has_no_violation() {
        // b = 0 makes f_S(x) = (1/m) Σ ⟨a_i, x⟩², a convex quadratic.
        let e = gaussian_ensemble(5, 40, 1).unwrap();
        let p = PhaseProblem { ensemble: e, b: vec![0.0; 40], truth: Some(vec![1.0; 5]), noise: None };
        let est = weak_convexity_probe(&p, 300, 1.0, 9).unwrap();
        assert!(est.rho_hat <= 1e-9, "{}", est.rho_hat);
    }

    #[test]
    fn scalar_concave_branch_has_modulus_two() {
        // On [0, 1], |x² − 1| = 1 − x² and the linearization gap is exactly
        // (y − x)², so the largest observed curvature is 2.
        let p = scalar_problem(1.0);
        let est = weak_convexity_probe(&p, 400, 1.0, 2).unwrap();
        assert!((est.rho_hat - 2.0).abs() < 1e-9, "{}", est.rho_hat);
    }

    #[test]
    fn empty_probes() {
        let p = scalar_problem(1.0);
        let w = weak_convexity_probe(&p, 0, 1.0, 1).unwrap();
        assert_eq!((w.rho_hat, w.samples), (0.0, 0));
        let s = sharpness_probe(&p, 0, 1).unwrap();
        assert_eq!(s.kappa_hat, f64::INFINITY);
        assert_eq!(s.samples, 0);
    }

    #[test]
    fn scalar_sharpness_is_one() {
        // |x² − 1| = |x − 1||x + 1| exactly.
        let p = scalar_problem(1.0);
        let s = sharpness_probe(&p, 50, 3).unwrap();
        assert!((s.kappa_hat - 1.0).abs() < 1e-12, "{}", s.kappa_hat);
    }

    #[test]
    fn probes_need_truth() {
        let mut p = scalar_problem(1.0);
        p.truth = None;
        assert_eq!(weak_convexity_probe(&p, 1, 1.0, 0), Err(Error::MissingTruth));
        assert_eq!(sharpness_probe(&p, 1, 0), Err(Error::MissingTruth));
    }

    #[test]
    fn abs_product_mean_endpoints() {
        assert!((abs_product_mean(1.0) - 1.0).abs() < 1e-15);
        assert!((abs_product_mean(0.0) - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn abs_product_mean_matches_monte_carlo() {
        let mut rng = SeededRng::new(5, 0);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for _ in 0..n {
            let z = (rng.normal() * rng.normal()).abs();
            sum += z;
            sq += z * z;
        }
        let mean = sum / n as f64;
        let se = ((sq / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - abs_product_mean(0.0)).abs() <= 3.0 * se, "{mean} vs {}", 2.0 / PI);
    }

    #[test]
    fn radial_minimizer_on_identity_rows() {
        // Rows e1, e2, e1: along u = e1 the residuals are |t² − 4| twice and
        // |0 − 9| once, minimized at t = 2.
        let e = dense_ensemble(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let p = PhaseProblem { ensemble: e, b: vec![4.0, 9.0, 4.0], truth: None, noise: None };
        assert_eq!(radial_stationary_point(&p, &[3.0, 0.0]).unwrap(), 2.0);
        assert!(radial_stationary_point(&p, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn concentration_rejects_hadamard() {
        let e = crate::measure::hadamard_ensemble(4, 1, 0).unwrap();
        assert_eq!(concentration_probe(&e, 1, 0), Err(Error::UnsupportedEnsemble("hadamard")));
    }
}
