//! Evaluation grids, discretized curves and trapezoidal quadrature.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Strictly increasing evaluation points shared by every curve of a computation.
///
/// Cloning is cheap; the point list is reference counted.
#[derive(Clone)]
pub struct Grid {
    points: Arc<[f64]>,
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        if let Some(bad) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite grid point {bad}")));
        }
        if let Some(j) = points.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(format!(
                "points must be strictly increasing (t[{j}] = {} >= t[{}] = {})",
                points[j],
                j + 1,
                points[j + 1]
            )));
        }
        Ok(Grid {
            points: points.into(),
        })
    }

    /// `len` equally spaced points from `start` to `end` inclusive.
    pub fn uniform(start: f64, end: f64, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {len}"
            )));
        }
        let step = (end - start) / (len - 1) as f64;
        let mut points: Vec<f64> = (0..len).map(|j| start + step * j as f64).collect();
        points[len - 1] = end;
        Grid::new(points)
    }

    /// Uniform grid over [0, 1].
    pub fn unit(len: usize) -> Result<Self> {
        Grid::uniform(0.0, 1.0, len)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.points[0]
    }

    pub fn end(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Trapezoidal quadrature weights; `Σ w_j f(t_j)` approximates `∫ f`.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let t = self.points();
        let m = t.len();
        let mut w = vec![0.0; m];
        for j in 0..m - 1 {
            let half = 0.5 * (t[j + 1] - t[j]);
            w[j] += half;
            w[j + 1] += half;
        }
        w
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::Incompatible(format!(
                "grids differ ({} points on [{}, {}] vs {} points on [{}, {}])",
                self.len(),
                self.start(),
                self.end(),
                other.len(),
                other.start(),
                other.end()
            )))
        }
    }
}

impl PartialEq for Grid {
    /// Bitwise equality of the point lists.
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.points, &other.points)
            || (self.points.len() == other.points.len()
                && self
                    .points
                    .iter()
                    .zip(other.points.iter())
                    .all(|(a, b)| a.to_bits() == b.to_bits()))
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Grid({} points on [{}, {}])",
            self.len(),
            self.start(),
            self.end()
        )
    }
}

/// A real function known at the points of a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    grid: Grid,
    values: Vec<f64>,
}

impl Curve {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidCurve(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidCurve(format!(
                "non-finite value {} at grid index {j}",
                values[j]
            )));
        }
        Ok(Curve { grid, values })
    }

    pub fn constant(grid: Grid, value: f64) -> Result<Self> {
        let m = grid.len();
        Curve::new(grid, vec![value; m])
    }

    pub fn zeros(grid: Grid) -> Self {
        let m = grid.len();
        Curve {
            grid,
            values: vec![0.0; m],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().iter().map(|&t| f(t)).collect();
        Curve::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pointwise `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Curve, b: f64) -> Result<Curve> {
        self.grid.ensure_same(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Curve::new(self.grid.clone(), values)
    }

    pub fn add(&self, other: &Curve) -> Result<Curve> {
        self.grid.ensure_same(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x + y)
            .collect();
        Curve::new(self.grid.clone(), values)
    }

    pub fn sub(&self, other: &Curve) -> Result<Curve> {
        self.combine(1.0, other, -1.0)
    }

    /// Pointwise `a·x(t) + b`.
    pub fn affine(&self, a: f64, b: f64) -> Result<Curve> {
        let values = self.values.iter().map(|x| a * x + b).collect();
        Curve::new(self.grid.clone(), values)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Trapezoidal approximation of the integral over the grid span.
    pub fn integrate(&self) -> Result<f64> {
        integrate(self)
    }
}

/// Trapezoidal-rule approximation of `∫ x(t) dt` over `[t_0, t_{m-1}]`.
pub fn integrate(curve: &Curve) -> Result<f64> {
    if let Some(j) = curve.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidCurve(format!(
            "non-finite value at grid index {j}"
        )));
    }
    Ok(trapezoid(curve.grid.points(), &curve.values))
}

pub(crate) fn trapezoid(t: &[f64], x: &[f64]) -> f64 {
    debug_assert_eq!(t.len(), x.len());
    t.windows(2)
        .zip(x.windows(2))
        .map(|(tw, xw)| 0.5 * (tw[1] - tw[0]) * (xw[0] + xw[1]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_bad_points() {
        assert!(Grid::new(vec![0.0]).is_err());
        assert!(Grid::new(vec![0.0, 0.0]).is_err());
        assert!(Grid::new(vec![1.0, 0.5]).is_err());
        assert!(Grid::new(vec![0.0, f64::NAN]).is_err());
        assert!(Grid::uniform(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn uniform_grid_endpoints_are_exact() {
        let g = Grid::uniform(0.0, 1.0, 24).unwrap();
        assert_eq!(g.start(), 0.0);
        assert_eq!(g.end(), 1.0);
        assert_eq!(g.len(), 24);
        assert_eq!(g, Grid::unit(24).unwrap());
        assert_ne!(g, Grid::unit(25).unwrap());
    }

    #[test]
    fn curve_rejects_non_finite_and_wrong_length() {
        let g = Grid::unit(3).unwrap();
        assert!(matches!(
            Curve::new(g.clone(), vec![0.0, f64::INFINITY, 1.0]),
            Err(Error::InvalidCurve(_))
        ));
        assert!(Curve::new(g, vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn integrate_constant_and_linear() {
        let g = Grid::unit(101).unwrap();
        let one = Curve::constant(g.clone(), 1.0).unwrap();
        assert!((integrate(&one).unwrap() - 1.0).abs() < 1e-15);
        let lin = Curve::from_fn(g, |t| t).unwrap();
        assert!((integrate(&lin).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn integrate_quadratic_matches_analytic_value() {
        // Trapezoid error for t² with h = 0.01 is h²/6 ≈ 1.667e-5 above 1/3.
        let g = Grid::unit(101).unwrap();
        let sq = Curve::from_fn(g, |t| t * t).unwrap();
        let v = integrate(&sq).unwrap();
        assert!((v - 0.33335).abs() < 1e-4);
        assert!((v - 1.0 / 3.0).abs() < 2e-5);
    }

    #[test]
    fn trapezoid_weights_sum_to_span() {
        let g = Grid::new(vec![0.0, 0.1, 0.5, 2.0]).unwrap();
        let total: f64 = g.trapezoid_weights().iter().sum();
        assert!((total - 2.0).abs() < 1e-15);
    }

    #[test]
    fn combine_requires_same_grid() {
        let a = Curve::zeros(Grid::unit(4).unwrap());
        let b = Curve::zeros(Grid::unit(5).unwrap());
        assert!(matches!(a.add(&b), Err(Error::Incompatible(_))));
    }
}
