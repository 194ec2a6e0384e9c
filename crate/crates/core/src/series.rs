//! Functional samples and time-ordered functional series.

use crate::error::{Error, Result};
use crate::grid::{Curve, Grid};

/// An unordered collection of curves on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalSample {
    grid: Grid,
    curves: Vec<Curve>,
}

impl FunctionalSample {
    pub fn new(grid: Grid, curves: Vec<Curve>) -> Result<Self> {
        for (i, c) in curves.iter().enumerate() {
            c.grid()
                .ensure_same(&grid)
                .map_err(|_| Error::Incompatible(format!("curve {i} is not on the sample grid")))?;
        }
        Ok(FunctionalSample { grid, curves })
    }

    /// Builds a sample from raw value rows, one row per curve.
    pub fn from_rows(grid: Grid, rows: Vec<Vec<f64>>) -> Result<Self> {
        let curves = rows
            .into_iter()
            .map(|r| Curve::new(grid.clone(), r))
            .collect::<Result<Vec<_>>>()?;
        Ok(FunctionalSample { grid, curves })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn into_curves(self) -> Vec<Curve> {
        self.curves
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub(crate) fn rows(&self) -> Vec<&[f64]> {
        self.curves.iter().map(Curve::values).collect()
    }

    /// Pointwise arithmetic mean of the selected curves, summed in index order.
    pub fn mean_of(&self, indices: &[usize]) -> Result<Curve> {
        if indices.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut acc = vec![0.0; self.grid.len()];
        for &i in indices {
            for (a, v) in acc.iter_mut().zip(self.curves[i].values()) {
                *a += v;
            }
        }
        let n = indices.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        Curve::new(self.grid.clone(), acc)
    }

    pub fn mean(&self) -> Result<Curve> {
        let all: Vec<usize> = (0..self.len()).collect();
        self.mean_of(&all)
    }

    /// Pointwise (min, max) envelope of the selected curves.
    pub fn envelope_of(&self, indices: &[usize]) -> Result<(Curve, Curve)> {
        if indices.is_empty() {
            return Err(Error::EmptySample);
        }
        let m = self.grid.len();
        let mut lo = vec![f64::INFINITY; m];
        let mut hi = vec![f64::NEG_INFINITY; m];
        for &i in indices {
            for (j, &v) in self.curves[i].values().iter().enumerate() {
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
            }
        }
        Ok((
            Curve::new(self.grid.clone(), lo)?,
            Curve::new(self.grid.clone(), hi)?,
        ))
    }
}

/// Curves `x_1, ..., x_N` in temporal order at a single hierarchy node.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalTimeSeries {
    inner: FunctionalSample,
}

impl FunctionalTimeSeries {
    pub fn new(grid: Grid, curves: Vec<Curve>) -> Result<Self> {
        Ok(FunctionalTimeSeries {
            inner: FunctionalSample::new(grid, curves)?,
        })
    }

    pub fn from_rows(grid: Grid, rows: Vec<Vec<f64>>) -> Result<Self> {
        Ok(FunctionalTimeSeries {
            inner: FunctionalSample::from_rows(grid, rows)?,
        })
    }

    /// A series of `len` zero curves.
    pub fn zeros(grid: Grid, len: usize) -> Self {
        let curves = (0..len).map(|_| Curve::zeros(grid.clone())).collect();
        FunctionalTimeSeries {
            inner: FunctionalSample { grid, curves },
        }
    }

    pub fn grid(&self) -> &Grid {
        self.inner.grid()
    }

    pub fn curves(&self) -> &[Curve] {
        self.inner.curves()
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    pub fn as_sample(&self) -> &FunctionalSample {
        &self.inner
    }

    /// The observation `x_n` with 1-based time index `n`.
    pub fn observation(&self, n: usize) -> Option<&Curve> {
        n.checked_sub(1).and_then(|i| self.inner.curves.get(i))
    }

    /// The moving window `{x_{n-k+1}, ..., x_n}` (1-based `n`).
    pub fn window(&self, n: usize, k: usize) -> Result<FunctionalSample> {
        if k == 0 || n < k || n > self.len() {
            return Err(Error::InsufficientHistory { n, k, node: None });
        }
        Ok(FunctionalSample {
            grid: self.grid().clone(),
            curves: self.inner.curves[n - k..n].to_vec(),
        })
    }

    pub(crate) fn window_rows(&self, n: usize, k: usize) -> Result<Vec<&[f64]>> {
        if k == 0 || n < k || n > self.len() {
            return Err(Error::InsufficientHistory { n, k, node: None });
        }
        Ok(self.inner.curves[n - k..n]
            .iter()
            .map(Curve::values)
            .collect())
    }

    pub(crate) fn replace(&mut self, index: usize, curve: Curve) {
        debug_assert!(curve.grid() == self.grid());
        self.inner.curves[index] = curve;
    }

    /// Pointwise `a·x_n(t) + b` for every curve.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        let curves = self
            .curves()
            .iter()
            .map(|c| c.affine(a, b))
            .collect::<Result<Vec<_>>>()?;
        FunctionalTimeSeries::new(self.grid().clone(), curves)
    }
}

/// Index-wise, pointwise sum of series sharing a grid and a length.
pub fn sum_series(series: &[&FunctionalTimeSeries]) -> Result<FunctionalTimeSeries> {
    let first = series
        .first()
        .ok_or_else(|| Error::Incompatible("cannot sum an empty list of series".into()))?;
    let grid = first.grid().clone();
    let len = first.len();
    for (i, s) in series.iter().enumerate().skip(1) {
        s.grid()
            .ensure_same(&grid)
            .map_err(|e| Error::Incompatible(format!("series {i}: {e}")))?;
        if s.len() != len {
            return Err(Error::Incompatible(format!(
                "series {i} has length {}, expected {len}",
                s.len()
            )));
        }
    }
    let m = grid.len();
    let curves = (0..len)
        .map(|n| {
            let mut acc = vec![0.0; m];
            for s in series {
                for (a, v) in acc.iter_mut().zip(s.curves()[n].values()) {
                    *a += v;
                }
            }
            Curve::new(grid.clone(), acc)
        })
        .collect::<Result<Vec<_>>>()?;
    FunctionalTimeSeries::new(grid, curves)
}
