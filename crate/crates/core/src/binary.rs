//! The binary model on `[-1, 1]`:
//! `(L φ)(t) = e^{t/2} φ((t+1)/2) + e^{-t/2} φ((t-1)/2)`.
//!
//! Under the embedding `t = sum_j x_j 2^{-j-1}` this is the transfer operator
//! of the binary potential at unit inverse temperature.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;

pub const DEFAULT_GRID_POINTS: usize = 2048;
pub const DEFAULT_FD_STEP: f64 = 1e-4;

pub fn apply_fn(f: impl Fn(f64) -> f64, t: f64) -> f64 {
    (t / 2.0).exp() * f((t + 1.0) / 2.0) + (-t / 2.0).exp() * f((t - 1.0) / 2.0)
}

/// `c_0 + c_1 t + c_2 t^2 + ...`
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.coeffs.iter().map(|v| v * c).collect())
    }

    /// `L p` sampled on a uniform grid.
    pub fn apply_on(&self, grid: &Grid) -> Grid {
        grid.sample(|t| apply_fn(|s| self.eval(s), t))
    }
}

/// The quadratic `φ(t) = (3/4) t^2 + (3/32)(15 + √353)` whose Taylor
/// expansion at 0 matches that of `L φ / c` through order two.
pub fn quadratic_eigen_guess() -> Polynomial {
    Polynomial::new(vec![3.0 / 32.0 * (15.0 + 353f64.sqrt()), 0.0, 0.75])
}

/// `c = (49 + √353) / 32`.
pub fn quadratic_eigen_constant() -> f64 {
    (49.0 + 353f64.sqrt()) / 32.0
}

/// Values on `n` uniformly spaced points of `[-1, 1]`, endpoints included.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub ts: Vec<f64>,
    pub values: Vec<f64>,
}

impl Grid {
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("grid needs at least 2 points, got {n}")));
        }
        let h = 2.0 / (n - 1) as f64;
        let ts = (0..n)
            .map(|i| if i == n - 1 { 1.0 } else { -1.0 + i as f64 * h })
            .collect();
        Ok(Self {
            ts,
            values: vec![0.0; n],
        })
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64 + Sync + Send) -> Self {
        let values = par::map_indices(self.ts.len(), |i| f(self.ts[i]));
        Self {
            ts: self.ts.clone(),
            values,
        }
    }

    /// Piecewise-linear interpolation; `t` is clamped to `[-1, 1]`.
    pub fn interpolate(&self, t: f64) -> f64 {
        let n = self.ts.len();
        let u = ((t.clamp(-1.0, 1.0) + 1.0) / 2.0) * (n - 1) as f64;
        let i = (u.floor() as usize).min(n - 2);
        let w = u - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    /// `L` applied to the interpolant of this grid, sampled on the same points.
    pub fn apply(&self) -> Self {
        self.sample(|t| apply_fn(|s| self.interpolate(s), t))
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Taylor coefficients `f(0), f'(0), f''(0)/2` from central differences
/// with step `h`, Richardson-extrapolated against step `2h`.
pub fn taylor_coefficients(f: impl Fn(f64) -> f64, h: f64) -> [f64; 3] {
    let d1 = |s: f64| (f(s) - f(-s)) / (2.0 * s);
    let d2 = |s: f64| (f(s) - 2.0 * f(0.0) + f(-s)) / (s * s);
    let r1 = (4.0 * d1(h) - d1(2.0 * h)) / 3.0;
    let r2 = (4.0 * d2(h) - d2(2.0 * h)) / 3.0;
    [f(0.0), r1, r2 / 2.0]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaylorComparison {
    pub c: f64,
    /// Coefficients of `L φ`.
    pub transformed: [f64; 3],
    /// Coefficients of `c φ`.
    pub scaled: [f64; 3],
    pub max_abs_diff: f64,
    /// `|(L φ)(0) - 3(17 + √353)/16|`.
    pub order_zero_defect: f64,
}

pub fn taylor_comparison(h: f64) -> TaylorComparison {
    let phi = quadratic_eigen_guess();
    let c = quadratic_eigen_constant();
    let transformed = taylor_coefficients(|t| apply_fn(|s| phi.eval(s), t), h);
    let scaled = taylor_coefficients(|t| c * phi.eval(t), h);
    let max_abs_diff = (0..3).map(|k| (transformed[k] - scaled[k]).abs()).fold(0.0, f64::max);
    let order_zero = 3.0 * (17.0 + 353f64.sqrt()) / 16.0;
    TaylorComparison {
        c,
        transformed,
        scaled,
        max_abs_diff,
        order_zero_defect: (apply_fn(|s| phi.eval(s), 0.0) - order_zero).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_maps_to_cosh() {
        let g = Grid::uniform(DEFAULT_GRID_POINTS).unwrap();
        let one = Polynomial::new(vec![1.0]).apply_on(&g);
        for (t, v) in one.ts.iter().zip(&one.values) {
            assert_relative_eq!(*v, 2.0 * (t / 2.0).cosh(), max_relative = 1e-15);
        }
        assert_eq!(g.ts[0], -1.0);
        assert_eq!(*g.ts.last().unwrap(), 1.0);
    }

    #[test]
    fn hand_expanded_taylor_coefficients() {
        let r = 353f64.sqrt();
        let cmp = taylor_comparison(DEFAULT_FD_STEP);
        assert_relative_eq!(cmp.transformed[0], 3.0 * (17.0 + r) / 16.0, max_relative = 1e-14);
        assert!(cmp.transformed[1].abs() < 1e-9);
        assert!((cmp.transformed[2] - 3.0 * (49.0 + r) / 128.0).abs() < 1e-6);
        assert!(cmp.order_zero_defect < 1e-12);
    }

    #[test]
    fn grid_apply_tracks_polynomial_apply() {
        let g = Grid::uniform(DEFAULT_GRID_POINTS).unwrap();
        let phi = quadratic_eigen_guess();
        let via_grid = g.sample(|t| phi.eval(t)).apply();
        let direct = phi.apply_on(&g);
        assert!(via_grid.sup_distance(&direct) < 1e-5);
    }

    #[test]
    fn polynomial_horner() {
        let p = Polynomial::new(vec![1.0, -2.0, 3.0]);
        assert_eq!(p.eval(2.0), 9.0);
        assert!(Grid::uniform(1).is_err());
    }
}
