use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, norm};

/// Relative threshold on `‖x − αx̄‖ / ‖x‖` below which `x` is collinear with `x̄`.
pub const COLLINEAR_TOL: f64 = 1e-10;

/// Extremal eigenpairs of `X = xxᵀ − x̄x̄ᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTwoSpectrum {
    pub lambda_max: f64,
    pub lambda_min: f64,
    /// Present when `lambda_max ≠ 0`; oriented so `⟨e_max, x⟩ ≥ 0`.
    pub e_max: Option<Vec<f64>>,
    /// Present when `lambda_min ≠ 0`; oriented so `⟨e_min, x̄⟩ ≥ 0`.
    pub e_min: Option<Vec<f64>>,
    pub collinear: bool,
    /// `X = 0`, i.e. `x = ±x̄`.
    pub degenerate: bool,
}

fn orient(mut e: Vec<f64>, first: &[f64], second: &[f64]) -> Vec<f64> {
    let s = dot(&e, first);
    let flip = if s != 0.0 { s < 0.0 } else { dot(&e, second) < 0.0 };
    if flip {
        e.iter_mut().for_each(|v| *v = -*v);
    }
    e
}

/// Eigen-decomposition through the 2×2 reduction on the orthonormal pair
/// `(x̄/‖x̄‖, v/‖v‖)` with `v = x − αx̄`, `α = ⟨x, x̄⟩/‖x̄‖²`.
pub fn rank_two_spectrum(x: &[f64], xbar: &[f64]) -> Result<RankTwoSpectrum> {
    check_len(xbar.len(), x.len())?;
    let nbar = norm(xbar);
    if nbar == 0.0 {
        return Err(Error::InvalidArgument("reference signal must be nonzero".into()));
    }
    let alpha = dot(x, xbar) / (nbar * nbar);
    let v: Vec<f64> = x.iter().zip(xbar).map(|(a, b)| a - alpha * b).collect();
    let nv = norm(&v);
    let nx = norm(x);
    let u1: Vec<f64> = xbar.iter().map(|b| b / nbar).collect();

    if nv <= COLLINEAR_TOL * nx || nx == 0.0 {
        // X = (α² − 1) x̄x̄ᵀ.
        let gap = alpha * alpha - 1.0;
        let lambda = if gap.abs() <= COLLINEAR_TOL { 0.0 } else { gap * nbar * nbar };
        let mut s = RankTwoSpectrum {
            lambda_max: 0.0,
            lambda_min: 0.0,
            e_max: None,
            e_min: None,
            collinear: true,
            degenerate: lambda == 0.0,
        };
        if lambda > 0.0 {
            s.lambda_max = lambda;
            s.e_max = Some(orient(u1, x, xbar));
        } else if lambda < 0.0 {
            s.lambda_min = lambda;
            s.e_min = Some(u1);
        }
        return Ok(s);
    }

    let u2: Vec<f64> = v.iter().map(|c| c / nv).collect();
    let a = (alpha * alpha - 1.0) * nbar * nbar;
    let b = alpha * nbar * nv;
    let c = nv * nv;
    // det = ac − b² = −‖x̄‖²‖v‖² < 0: one eigenvalue of each sign.
    let det = -(nbar * nbar) * (nv * nv);
    let mean = 0.5 * (a + c);
    let radius = (0.5 * (a - c)).hypot(b);
    let (lambda_max, lambda_min) = if mean >= 0.0 {
        let l1 = mean + radius;
        (l1, det / l1)
    } else {
        let l2 = mean - radius;
        (det / l2, l2)
    };

    // Eigenvector of the 2×2 block for lambda_max, from whichever row of
    // (M − λI) gives the better-conditioned null vector.
    let p = (b, lambda_max - a);
    let q = (lambda_max - c, b);
    let (c1, c2) = if p.0.hypot(p.1) >= q.0.hypot(q.1) { p } else { q };
    let len = c1.hypot(c2);
    let (c1, c2) = (c1 / len, c2 / len);
    let e_max: Vec<f64> = u1.iter().zip(&u2).map(|(s, t)| c1 * s + c2 * t).collect();
    let e_min: Vec<f64> = u1.iter().zip(&u2).map(|(s, t)| -c2 * s + c1 * t).collect();

    Ok(RankTwoSpectrum {
        lambda_max,
        lambda_min,
        e_max: Some(orient(e_max, x, xbar)),
        e_min: Some(orient(e_min, xbar, x)),
        collinear: false,
        degenerate: false,
    })
}
