//! Dimensionless scores locating a candidate stationary point of `f_S`.
//!
//! With enough Gaussian measurements every stationary point `x` of `f_S`
//! either has a small product `‖x‖‖x − x̄‖‖x + x̄‖ / ‖x̄‖³` (near `0` or
//! `±x̄`), or is close to the ring: `‖x‖/‖x̄‖ ≈ c` and `x` nearly orthogonal
//! to `x̄`. Both deviations shrink like `(d/m)^{1/4}`. The certificate
//! reports each score with the factor it is compared against divided out,
//! together with that scale; the constants hidden in the asymptotic bounds
//! are unknown, so the verdict uses a configurable multiple of the scale.

use crate::error::{check_len, Error, Result};
use crate::linalg::{dist_to_pair, dot, norm};

use super::outer::critical_ratio;

/// Largest normalized score (score / scale) still counted as explained.
pub const DEFAULT_VERDICT_THRESHOLD: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NearSignal,
    NearZero,
    NearOrthogonalRing,
    Unexplained,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::NearSignal => "NearSignal",
            Verdict::NearZero => "NearZero",
            Verdict::NearOrthogonalRing => "NearOrthogonalRing",
            Verdict::Unexplained => "Unexplained",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandscapeCertificate {
    /// `‖x‖‖x − x̄‖‖x + x̄‖ / ‖x̄‖³`.
    pub block1_score: f64,
    /// `|‖x‖/‖x̄‖ − c| / (1 + ‖x̄‖/‖x‖)`.
    pub block2_ratio_score: f64,
    /// `(|⟨x, x̄⟩| / (‖x‖‖x̄‖)) · (‖x‖/‖x̄‖)`.
    pub block2_angle_score: f64,
    /// `(d/m)^{1/4}`.
    pub scale: f64,
    pub verdict: Verdict,
}

impl LandscapeCertificate {
    /// The ring alternative needs both of its inequalities.
    pub fn block2_score(&self) -> f64 {
        self.block2_ratio_score.max(self.block2_angle_score)
    }

    /// Smallest of the two block scores divided by the scale.
    pub fn normalized_score(&self) -> f64 {
        self.block1_score.min(self.block2_score()) / self.scale
    }
}

pub fn certify_stationary(x: &[f64], xbar: &[f64], d: usize, m: usize) -> Result<LandscapeCertificate> {
    certify_stationary_with(x, xbar, d, m, DEFAULT_VERDICT_THRESHOLD)
}

pub fn certify_stationary_with(
    x: &[f64],
    xbar: &[f64],
    d: usize,
    m: usize,
    threshold: f64,
) -> Result<LandscapeCertificate> {
    check_len(xbar.len(), x.len())?;
    let nbar = norm(xbar);
    if nbar == 0.0 {
        return Err(Error::InvalidArgument("reference signal must be nonzero".into()));
    }
    if d == 0 || m == 0 {
        return Err(Error::InvalidArgument("certification needs d >= 1 and m >= 1".into()));
    }
    let scale = (d as f64 / m as f64).powf(0.25);
    let nx = norm(x);
    let c = critical_ratio();
    if nx == 0.0 {
        return Ok(LandscapeCertificate {
            block1_score: 0.0,
            block2_ratio_score: 0.0,
            block2_angle_score: 0.0,
            scale,
            verdict: Verdict::NearZero,
        });
    }
    let minus: f64 = x.iter().zip(xbar).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let plus: f64 = x.iter().zip(xbar).map(|(a, b)| (a + b).powi(2)).sum::<f64>().sqrt();
    let block1_score = nx * minus * plus / nbar.powi(3);
    let block2_ratio_score = (nx / nbar - c).abs() / (1.0 + nbar / nx);
    let inner = dot(x, xbar);
    let block2_angle_score = (inner.abs() / (nx * nbar)) * (nx / nbar);

    let mut cert = LandscapeCertificate { block1_score, block2_ratio_score, block2_angle_score, scale, verdict: Verdict::Unexplained };
    if cert.normalized_score() > threshold {
        return Ok(cert);
    }
    // Each block covers the origin as well; pick the nearer of its sets.
    cert.verdict = if block1_score <= cert.block2_score() {
        if nx < dist_to_pair(x, xbar) {
            Verdict::NearZero
        } else {
            Verdict::NearSignal
        }
    } else {
        let along = inner / nbar;
        let perp = (nx * nx - along * along).max(0.0).sqrt();
        if nx < along.hypot(perp - c * nbar) {
            Verdict::NearZero
        } else {
            Verdict::NearOrthogonalRing
        }
    };
    Ok(cert)
}
