//! Brute-force check, in the plane, that stationary points of `f_S` sit close
//! to nearly stationary points of `f_P`.
//!
//! Grid-local minima of `‖ζ_S‖` stand in for stationary points of `f_S`. For
//! each one the audit searches the ball of radius
//! `√(4δ̂/(ρ̂ + 2δ̂)) · √(‖x − x̄‖‖x + x̄‖)` for the point of smallest `‖∇f_P‖`,
//! where `δ̂` is the largest grid value of `|f_S − f_P| / (‖x − x̄‖‖x + x̄‖)`
//! and `ρ̂` comes from [`weak_convexity_probe`]. Both are empirical stand-ins
//! for uniform constants, so this is an audit heuristic, not a proof check.

use crate::error::{Error, Result};
use crate::linalg::{dist, dist_neg, norm};
use crate::measure::PhaseProblem;
use crate::objective::{value_and_subgradient, weak_convexity_probe};
use crate::par;

use super::population::{population_gradient, population_value, PopulationGradient};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditConfig {
    /// Grid minima with `‖ζ_S‖ > subgrad_threshold · ‖x̄‖` are ignored.
    pub subgrad_threshold: f64,
    pub probe_triples: usize,
    pub probe_seed: u64,
    /// Points per axis of the coarse search inside each ball.
    pub search_points: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self { subgrad_threshold: 0.1, probe_triples: 2000, probe_seed: 0, search_points: 41 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditEntry {
    pub x_s: Vec<f64>,
    pub subgrad_norm: f64,
    pub x_p_near: Vec<f64>,
    pub pop_grad_norm: f64,
    pub radius: f64,
    pub dist: f64,
}

pub fn graph_closeness_audit(p: &PhaseProblem, grid_half_width: f64, grid_n: usize) -> Result<Vec<AuditEntry>> {
    graph_closeness_audit_with(p, grid_half_width, grid_n, &AuditConfig::default())
}

fn grad_norm(x: &[f64], xbar: &[f64]) -> Result<Option<f64>> {
    Ok(match population_gradient(x, xbar)? {
        PopulationGradient::Gradient(g) => Some(norm(&g)),
        PopulationGradient::NonsmoothPoint => None,
    })
}

pub fn graph_closeness_audit_with(
    p: &PhaseProblem,
    grid_half_width: f64,
    grid_n: usize,
    cfg: &AuditConfig,
) -> Result<Vec<AuditEntry>> {
    if p.d() != 2 {
        return Err(Error::InvalidArgument(format!("audit works in the plane, got d = {}", p.d())));
    }
    let xbar = p.truth()?.to_vec();
    if grid_n < 3 || !(grid_half_width > 0.0) {
        return Err(Error::InvalidArgument("audit needs grid_n >= 3 and a positive half width".into()));
    }
    let nbar = norm(&xbar);
    if nbar == 0.0 {
        return Err(Error::InvalidArgument("reference signal must be nonzero".into()));
    }
    let h = 2.0 * grid_half_width / (grid_n - 1) as f64;
    let coord = |i: usize| -grid_half_width + i as f64 * h;

    // Row-major: index = i * n + j, point (coord(i), coord(j)).
    let cells = par::map_range(grid_n * grid_n, 64, |idx| -> Result<(f64, f64)> {
        let x = [coord(idx / grid_n), coord(idx % grid_n)];
        let (f_s, g) = value_and_subgradient(p, &x)?;
        let product = dist(&x, &xbar) * dist_neg(&x, &xbar);
        let ratio = if product > 1e-12 * nbar * nbar {
            (f_s - population_value(&x, &xbar)?).abs() / product
        } else {
            0.0
        };
        Ok((norm(&g), ratio))
    });
    let cells: Vec<(f64, f64)> = cells.into_iter().collect::<Result<_>>()?;
    let delta_hat = cells.iter().fold(0.0f64, |m, c| m.max(c.1));
    let probe_radius = (nbar + std::f64::consts::SQRT_2 * grid_half_width) / nbar;
    let rho_hat = weak_convexity_probe(p, cfg.probe_triples, probe_radius, cfg.probe_seed)?.rho_hat;
    let factor = if rho_hat + 2.0 * delta_hat > 0.0 {
        (4.0 * delta_hat / (rho_hat + 2.0 * delta_hat)).sqrt()
    } else {
        0.0
    };

    let threshold = cfg.subgrad_threshold * nbar;
    let mut entries = Vec::new();
    for i in 0..grid_n {
        for j in 0..grid_n {
            let here = cells[i * grid_n + j].0;
            if here > threshold {
                continue;
            }
            let is_min = neighbors(i, j, grid_n).all(|(a, b)| here <= cells[a * grid_n + b].0);
            if !is_min {
                continue;
            }
            let x_s = vec![coord(i), coord(j)];
            let radius = factor * (dist(&x_s, &xbar) * dist_neg(&x_s, &xbar)).sqrt();
            let (x_p_near, pop_grad_norm) = nearest_population_stationary(&x_s, &xbar, radius, cfg.search_points)?;
            let gap = dist(&x_s, &x_p_near);
            entries.push(AuditEntry { x_s, subgrad_norm: here, x_p_near, pop_grad_norm, radius, dist: gap });
        }
    }
    Ok(entries)
}

fn neighbors(i: usize, j: usize, n: usize) -> impl Iterator<Item = (usize, usize)> {
    let (i, j) = (i as isize, j as isize);
    (-1..=1isize)
        .flat_map(move |di| (-1..=1isize).map(move |dj| (i + di, j + dj)))
        .filter(move |&(a, b)| (a, b) != (i, j) && a >= 0 && b >= 0 && a < n as isize && b < n as isize)
        .map(|(a, b)| (a as usize, b as usize))
}

/// Point of smallest `‖∇f_P‖` in the closed ball `B(center, radius)`:
/// coarse grid over the ball plus the nonsmooth stationary points `0, ±x̄`,
/// then a shrinking compass search from the best candidate.
fn nearest_population_stationary(
    center: &[f64],
    xbar: &[f64],
    radius: f64,
    search_points: usize,
) -> Result<(Vec<f64>, f64)> {
    let inside = |x: &[f64]| dist(x, center) <= radius;
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut consider = |x: Vec<f64>| -> Result<()> {
        if let Some(g) = grad_norm(&x, xbar)? {
            if best.as_ref().is_none_or(|(_, b)| g < *b) {
                best = Some((x, g));
            }
        }
        Ok(())
    };
    consider(center.to_vec())?;
    let neg: Vec<f64> = xbar.iter().map(|v| -v).collect();
    for special in [vec![0.0; 2], xbar.to_vec(), neg] {
        if inside(&special) {
            consider(special)?;
        }
    }
    if radius > 0.0 && search_points >= 2 {
        let step = 2.0 * radius / (search_points - 1) as f64;
        for a in 0..search_points {
            for b in 0..search_points {
                let x = vec![center[0] - radius + a as f64 * step, center[1] - radius + b as f64 * step];
                if inside(&x) {
                    consider(x)?;
                }
            }
        }
    }
    let Some((mut x, mut g)) = best else {
        // Every probed point was nonsmooth; report the center with no gradient.
        return Ok((center.to_vec(), f64::INFINITY));
    };
    let mut step = radius / search_points.max(2) as f64;
    let floor = radius * 1e-9;
    let dirs = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];
    let mut rounds = 0;
    while step > floor && g > 0.0 && rounds < 400 {
        rounds += 1;
        let mut improved = false;
        for (dx, dy) in dirs {
            let y = vec![x[0] + dx * step, x[1] + dy * step];
            if !inside(&y) {
                continue;
            }
            if let Some(gy) = grad_norm(&y, xbar)? {
                if gy < g {
                    x = y;
                    g = gy;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((x, g))
}
