//! The two-eigenvalue outer function `ζ(y₁, y₂) = E|v₁y₁ + v₂y₂|`,
//! `v₁, v₂ ~ χ²₁`, on the quadrant `y₁ ≥ 0 ≥ y₂`, and the critical ratio.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};

const BISECTION_TOL: f64 = 1e-12;

fn check_quadrant(y1: f64, y2: f64) -> Result<()> {
    if y1 >= 0.0 && y2 <= 0.0 && y1.is_finite() && y2.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("zeta needs y1 >= 0 >= y2, got ({y1}, {y2})")))
    }
}

/// Closed form
/// `(4/π)[(y₁+y₂) arctan √(−y₁/y₂) + √(−y₁y₂)] − (y₁+y₂)`, extended to the
/// axes by continuity: `ζ(y₁, 0) = y₁`, `ζ(0, y₂) = −y₂`.
pub fn zeta(y1: f64, y2: f64) -> Result<f64> {
    check_quadrant(y1, y2)?;
    if y2 == 0.0 {
        return Ok(y1);
    }
    if y1 == 0.0 {
        return Ok(-y2);
    }
    let trace = y1 + y2;
    let ratio = (-y1 / y2).sqrt();
    Ok(4.0 / PI * (trace * ratio.atan() + (-y1 * y2).sqrt()) - trace)
}

fn d1_formula(y1: f64, y2: f64) -> f64 {
    let ratio = (-y1 / y2).sqrt();
    4.0 / PI * ((y1 + y2) / (2.0 * ratio * (y1 - y2)) - y2 / (2.0 * (-y1 * y2).sqrt()) + ratio.atan()) - 1.0
}

/// Partial derivatives `(∂₁ζ, ∂₂ζ)` on the open quadrant `y₁ > 0 > y₂`.
///
/// `∂₂ζ` comes from the exchange symmetry `ζ(y₁, y₂) = ζ(−y₂, −y₁)`:
/// `∂₂ζ(y₁, y₂) = −∂₁ζ(−y₂, −y₁)`.
pub fn zeta_grad(y1: f64, y2: f64) -> Result<(f64, f64)> {
    check_quadrant(y1, y2)?;
    if y1 == 0.0 || y2 == 0.0 {
        return Err(Error::Boundary);
    }
    Ok((d1_formula(y1, y2), -d1_formula(-y2, -y1)))
}

/// `ω(c) = c/(1 + c²) + arctan c`, strictly increasing from 0 to π/2.
pub fn omega(c: f64) -> f64 {
    c / (1.0 + c * c) + c.atan()
}

fn solve_omega(target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while omega(hi) < target {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if omega(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Root of `ω(c) = π/4`: the radius, relative to `‖x̄‖`, of the extraneous
/// stationary ring in `x̄⊥`.
pub fn critical_ratio() -> f64 {
    solve_omega(FRAC_PI_4)
}

/// Roots `c₁ ≤ c ≤ c₂` of `ω(c₁) = (π/4)(1 − ε)` and `ω(c₂) = (π/4)(1 + ε)`:
/// the range of ratios `√(λ₁/−λ_d)` on which `|∂₁ζ| ≤ ε`.
pub fn ratio_band(eps: f64) -> Result<(f64, f64)> {
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::Domain(format!("eps = {eps} not in [0, 1/2)")));
    }
    if eps == 0.0 {
        let c = critical_ratio();
        return Ok((c, c));
    }
    debug_assert!(FRAC_PI_4 * (1.0 + eps) < FRAC_PI_2);
    Ok((solve_omega(FRAC_PI_4 * (1.0 - eps)), solve_omega(FRAC_PI_4 * (1.0 + eps))))
}
