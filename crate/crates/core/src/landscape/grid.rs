use crate::error::{Error, Result};
use crate::par;

use super::population::{population_gradient, population_value};

/// One cell of a planar landscape grid. `grad_norm` is NaN on cells where
/// `f_P` has a kink (collinear with `x̄`, other than `0, ±x̄`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell {
    pub x1: f64,
    pub x2: f64,
    pub f_p: f64,
    pub grad_norm: f64,
}

/// Evaluates `f_P` and `‖∇f_P‖` on an `n × n` grid over
/// `[−half_width, half_width]²`, row-major with `x1` the slow index.
pub fn population_grid(xbar: &[f64], half_width: f64, n: usize) -> Result<Vec<GridCell>> {
    if xbar.len() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: xbar.len() });
    }
    if n < 2 || !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::InvalidArgument("grid needs n >= 2 and a positive finite half width".into()));
    }
    let h = 2.0 * half_width / (n - 1) as f64;
    let coord = |i: usize| -half_width + i as f64 * h;
    par::map_range(n * n, 256, |idx| {
        let x = [coord(idx / n), coord(idx % n)];
        let f_p = population_value(&x, xbar)?;
        let grad_norm = population_gradient(&x, xbar)?.norm().unwrap_or(f64::NAN);
        Ok(GridCell { x1: x[0], x2: x[1], f_p, grad_norm })
    })
    .into_iter()
    .collect()
}

/// Grid-local minima of `grad_norm` (8-neighbourhood, NaN neighbours
/// ignored) whose value is below `threshold`.
pub fn grid_local_minima(cells: &[GridCell], n: usize, threshold: f64) -> Vec<GridCell> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let here = cells[i * n + j];
            if !(here.grad_norm < threshold) {
                continue;
            }
            let mut is_min = true;
            for di in -1isize..=1 {
                for dj in -1isize..=1 {
                    let (a, b) = (i as isize + di, j as isize + dj);
                    if (di, dj) == (0, 0) || a < 0 || b < 0 || a >= n as isize || b >= n as isize {
                        continue;
                    }
                    let other = cells[a as usize * n + b as usize].grad_norm;
                    if other < here.grad_norm {
                        is_min = false;
                    }
                }
            }
            if is_min {
                out.push(here);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_grid() {
        let cells = population_grid(&[1.0, 1.0], 1.0, 2).unwrap();
        assert_eq!(cells.len(), 4);
        assert_eq!((cells[1].x1, cells[1].x2), (-1.0, 1.0));
        // (−1, −1) and (1, 1) are ±x̄.
        assert_eq!(cells[0].grad_norm, 0.0);
        assert_eq!(cells[3].f_p, 0.0);
    }

    #[test]
    fn nan_exactly_on_collinear_cells() {
        let n = 9;
        let cells = population_grid(&[1.0, 1.0], 2.0, n).unwrap();
        for c in &cells {
            let collinear = c.x1 == c.x2;
            let special = c.x1 == 0.0 || c.x1.abs() == 1.0;
            assert_eq!(c.grad_norm.is_nan(), collinear && !special, "{c:?}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(population_grid(&[1.0, 1.0], 1.0, 1).is_err());
        assert!(population_grid(&[1.0], 1.0, 3).is_err());
    }
}
