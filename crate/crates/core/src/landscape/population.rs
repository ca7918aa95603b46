use crate::error::{check_len, Error, Result};
use crate::linalg::{dist, dist_neg, dot, norm};

use super::outer::{critical_ratio, zeta, zeta_grad};
use super::spectrum::rank_two_spectrum;

/// `f_P(x) = ζ(λ₁(X), λ_d(X))`.
pub fn population_value(x: &[f64], xbar: &[f64]) -> Result<f64> {
    let s = rank_two_spectrum(x, xbar)?;
    zeta(s.lambda_max, s.lambda_min)
}

#[derive(Debug, Clone, PartialEq)]
pub enum PopulationGradient {
    /// The gradient at a smooth point, or the zero subgradient at `0`, `±x̄`.
    Gradient(Vec<f64>),
    /// `x` is collinear with `x̄` and not one of `0, ±x̄`; `f_P` has a kink
    /// there and `∂₁ζ` or `∂₂ζ` diverges.
    NonsmoothPoint,
}

impl PopulationGradient {
    pub fn norm(&self) -> Option<f64> {
        match self {
            PopulationGradient::Gradient(g) => Some(norm(g)),
            PopulationGradient::NonsmoothPoint => None,
        }
    }
}

/// `∇f_P(x) = 2(∂₁ζ ⟨e₁, x⟩ e₁ + ∂₂ζ ⟨e_d, x⟩ e_d)` at non-collinear `x`.
///
/// At `x = 0` and `x = ±x̄` the zero vector is returned: both are stationary
/// (`0 ∈ ∂f_P`), the latter being global minimizers.
pub fn population_gradient(x: &[f64], xbar: &[f64]) -> Result<PopulationGradient> {
    let s = rank_two_spectrum(x, xbar)?;
    if s.collinear {
        if s.degenerate || x.iter().all(|&v| v == 0.0) {
            return Ok(PopulationGradient::Gradient(vec![0.0; x.len()]));
        }
        return Ok(PopulationGradient::NonsmoothPoint);
    }
    let (d1, d2) = zeta_grad(s.lambda_max, s.lambda_min)?;
    let e1 = s.e_max.expect("non-collinear spectrum has both eigenvectors");
    let ed = s.e_min.expect("non-collinear spectrum has both eigenvectors");
    let w1 = 2.0 * d1 * dot(&e1, x);
    let wd = 2.0 * d2 * dot(&ed, x);
    Ok(PopulationGradient::Gradient(e1.iter().zip(&ed).map(|(a, b)| w1 * a + wd * b).collect()))
}

/// Distance from `x` to `{0} ∪ {±x̄} ∪ {x ⟂ x̄ : ‖x‖ = c‖x̄‖}`.
pub fn stationary_set_distance(x: &[f64], xbar: &[f64]) -> Result<f64> {
    check_len(xbar.len(), x.len())?;
    let nbar = norm(xbar);
    if nbar == 0.0 {
        return Err(Error::InvalidArgument("reference signal must be nonzero".into()));
    }
    let c = critical_ratio();
    let along = dot(x, xbar) / nbar;
    let alpha = along / nbar;
    let perp = x.iter().zip(xbar).map(|(a, b)| (a - alpha * b).powi(2)).sum::<f64>().sqrt();
    let ring = along.hypot(perp - c * nbar);
    Ok(norm(x).min(dist(x, xbar)).min(dist_neg(x, xbar)).min(ring))
}
