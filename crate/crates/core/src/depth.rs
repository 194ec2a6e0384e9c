//! Band depths for functional data and the depth-induced functional median.
//!
//! Bands are always spanned by two sample curves. The Lebesgue measure of the
//! set where a curve lies inside a band is approximated by counting grid
//! points, so every depth here is a rational number with denominator
//! `C(N, 2) · m`. Membership counts are accumulated as integers, which makes
//! the optimized routines and the brute-force oracle agree bit for bit.
//!
//! MBD has an O(N·m·log N) path for a whole sample via per-point ranks. GBD
//! needs the longest run of membership per band and stays O(N³·m) for a
//! whole sample.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Curve;
use crate::series::FunctionalSample;

/// Depth differences at or below this are treated as ties by the median.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Which band depth induces the ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DepthKind {
    /// Modified band depth: proportion of the domain inside each band.
    #[default]
    Mbd,
    /// Generalized band depth: longest consecutive stretch inside each band.
    Gbd,
}

impl fmt::Display for DepthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DepthKind::Mbd => "mbd",
            DepthKind::Gbd => "gbd",
        })
    }
}

impl FromStr for DepthKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mbd" => Ok(DepthKind::Mbd),
            "gbd" => Ok(DepthKind::Gbd),
            other => Err(format!("unknown depth `{other}` (expected mbd or gbd)")),
        }
    }
}

/// Per-curve depth values, in sample order.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthVector {
    values: Vec<f64>,
}

impl DepthVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Indices whose depth is within [`TIE_TOLERANCE`] of the maximum.
    pub fn argmax_set(&self) -> Vec<usize> {
        argmax_set(&self.values)
    }

    /// Indices ordered from deepest to shallowest; ties keep sample order.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.values.len()).collect();
        idx.sort_by(|&a, &b| self.values[b].total_cmp(&self.values[a]).then(a.cmp(&b)));
        idx
    }
}

impl From<DepthVector> for Vec<f64> {
    fn from(d: DepthVector) -> Self {
        d.values
    }
}

fn argmax_set(values: &[f64]) -> Vec<usize> {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .enumerate()
        .filter(|(_, &d)| best - d <= TIE_TOLERANCE)
        .map(|(i, _)| i)
        .collect()
}

#[inline]
fn pairs(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

fn check_sample(x: Option<&Curve>, sample: &FunctionalSample, min: usize) -> Result<()> {
    if sample.len() < min {
        return Err(Error::SampleTooSmall {
            required: min,
            actual: sample.len(),
        });
    }
    if let Some(x) = x {
        x.grid().ensure_same(sample.grid())?;
    }
    Ok(())
}

fn normalize(count: u64, n: usize, m: usize) -> f64 {
    count as f64 / (pairs(n as u64) * m as u64) as f64
}

/// Modified band depth of `x` with respect to `sample`.
pub fn mbd(x: &Curve, sample: &FunctionalSample) -> Result<f64> {
    check_sample(Some(x), sample, 2)?;
    let rows = sample.rows();
    Ok(normalize(mbd_count(x.values(), &rows), rows.len(), x.len()))
}

/// Generalized band depth of `x` with respect to `sample`.
pub fn gbd(x: &Curve, sample: &FunctionalSample) -> Result<f64> {
    check_sample(Some(x), sample, 2)?;
    let rows = sample.rows();
    Ok(normalize(gbd_count(x.values(), &rows), rows.len(), x.len()))
}

/// Modified epigraph index: mean fraction of the grid where a sample curve lies on or above `x`.
pub fn mei(x: &Curve, sample: &FunctionalSample) -> Result<f64> {
    check_sample(Some(x), sample, 1)?;
    let rows = sample.rows();
    Ok(mei_count(x.values(), &rows) as f64 / (rows.len() * x.len()) as f64)
}

/// Depth of every sample member with respect to the whole sample (self included).
pub fn depths(sample: &FunctionalSample, kind: DepthKind) -> Result<DepthVector> {
    check_sample(None, sample, 2)?;
    Ok(DepthVector {
        values: depths_rows(&sample.rows(), kind),
    })
}

/// Brute-force enumeration of every band for every curve; a reference for [`depths`].
pub fn depths_oracle(sample: &FunctionalSample, kind: DepthKind) -> Result<DepthVector> {
    check_sample(None, sample, 2)?;
    let rows = sample.rows();
    let n = rows.len();
    let m = sample.grid().len();
    let values = rows
        .iter()
        .map(|x| {
            let mut total = 0u64;
            for i1 in 0..n {
                for i2 in i1 + 1..n {
                    let mut inside = 0u64;
                    let mut run = 0u64;
                    let mut longest = 0u64;
                    for t in 0..m {
                        let lo = rows[i1][t].min(rows[i2][t]);
                        let hi = rows[i1][t].max(rows[i2][t]);
                        if lo <= x[t] && x[t] <= hi {
                            inside += 1;
                            run += 1;
                            longest = longest.max(run);
                        } else {
                            run = 0;
                        }
                    }
                    total += match kind {
                        DepthKind::Mbd => inside,
                        DepthKind::Gbd => longest,
                    };
                }
            }
            normalize(total, n, m)
        })
        .collect();
    Ok(DepthVector { values })
}

/// The deepest sample curve; ties are resolved by the pointwise mean of all maximizers.
pub fn functional_median(sample: &FunctionalSample, kind: DepthKind) -> Result<Curve> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let values = median_rows(&sample.rows(), kind);
    Curve::new(sample.grid().clone(), values)
}

pub(crate) fn depths_rows(rows: &[&[f64]], kind: DepthKind) -> Vec<f64> {
    let n = rows.len();
    let m = rows[0].len();
    let counts = match kind {
        DepthKind::Mbd => mbd_counts_ranked(rows),
        DepthKind::Gbd => gbd_counts(rows),
    };
    counts.into_iter().map(|c| normalize(c, n, m)).collect()
}

pub(crate) fn median_rows(rows: &[&[f64]], kind: DepthKind) -> Vec<f64> {
    if rows.len() == 1 {
        return rows[0].to_vec();
    }
    let d = depths_rows(rows, kind);
    let best = argmax_set(&d);
    if best.len() == 1 {
        return rows[best[0]].to_vec();
    }
    let mut acc = vec![0.0; rows[0].len()];
    for &i in &best {
        for (a, v) in acc.iter_mut().zip(rows[i]) {
            *a += v;
        }
    }
    let k = best.len() as f64;
    acc.iter_mut().for_each(|a| *a /= k);
    acc
}

/// Number of (band, grid point) memberships of `x`: at each point the bands missing
/// `x` are exactly those with both curves strictly below or both strictly above.
fn mbd_count(x: &[f64], rows: &[&[f64]]) -> u64 {
    let total = pairs(rows.len() as u64);
    let mut count = 0u64;
    for (t, &xt) in x.iter().enumerate() {
        let mut below = 0u64;
        let mut above = 0u64;
        for r in rows {
            let v = r[t];
            if v < xt {
                below += 1;
            } else if v > xt {
                above += 1;
            }
        }
        count += total - pairs(below) - pairs(above);
    }
    count
}

/// Whole-sample MBD counts from per-point ranks, O(N·m·log N).
fn mbd_counts_ranked(rows: &[&[f64]]) -> Vec<u64> {
    let n = rows.len();
    let m = rows[0].len();
    let total = pairs(n as u64);
    let mut counts = vec![0u64; n];
    // (value, curve) pairs of one grid point; the previous point's order is kept as the
    // starting permutation, which is nearly sorted for smooth curves.
    let mut col: Vec<(f64, usize)> = (0..n).map(|i| (0.0, i)).collect();
    #[allow(clippy::needless_range_loop)]
    for t in 0..m {
        col.iter_mut().for_each(|e| e.0 = rows[e.1][t]);
        if n <= 32 {
            insertion_sort(&mut col);
        } else {
            col.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        }
        let mut start = 0;
        while start < n {
            let v = col[start].0;
            let mut end = start + 1;
            while end < n && col[end].0 == v {
                end += 1;
            }
            // Curves in col[start..end] tie at this point.
            let below = start as u64;
            let above = (n - end) as u64;
            let c = total - pairs(below) - pairs(above);
            for e in &col[start..end] {
                counts[e.1] += c;
            }
            start = end;
        }
    }
    counts
}

fn insertion_sort(col: &mut [(f64, usize)]) {
    for i in 1..col.len() {
        let item = col[i];
        let mut j = i;
        while j > 0 && col[j - 1].0 > item.0 {
            col[j] = col[j - 1];
            j -= 1;
        }
        col[j] = item;
    }
}

fn longest_run(x: &[f64], lo: &[f64], hi: &[f64]) -> u64 {
    let mut run = 0u64;
    let mut longest = 0u64;
    for ((&v, &l), &h) in x.iter().zip(lo).zip(hi) {
        if l <= v && v <= h {
            run += 1;
            if run > longest {
                longest = run;
            }
        } else {
            run = 0;
        }
    }
    longest
}

fn gbd_count(x: &[f64], rows: &[&[f64]]) -> u64 {
    let n = rows.len();
    let m = x.len();
    let mut lo = vec![0.0; m];
    let mut hi = vec![0.0; m];
    let mut count = 0u64;
    for i1 in 0..n {
        for i2 in i1 + 1..n {
            for t in 0..m {
                let (a, b) = (rows[i1][t], rows[i2][t]);
                lo[t] = a.min(b);
                hi[t] = a.max(b);
            }
            count += longest_run(x, &lo, &hi);
        }
    }
    count
}

/// Whole-sample GBD counts. Each band envelope is built once and every curve is
/// scanned against it; a curve spanning the band contributes the full grid.
fn gbd_counts(rows: &[&[f64]]) -> Vec<u64> {
    let n = rows.len();
    let m = rows[0].len() as u64;
    let bands: Vec<(usize, usize)> = (0..n)
        .flat_map(|i1| (i1 + 1..n).map(move |i2| (i1, i2)))
        .collect();

    let per_band = |&(i1, i2): &(usize, usize)| -> Vec<u64> {
        let lo: Vec<f64> = rows[i1]
            .iter()
            .zip(rows[i2])
            .map(|(a, b)| a.min(*b))
            .collect();
        let hi: Vec<f64> = rows[i1]
            .iter()
            .zip(rows[i2])
            .map(|(a, b)| a.max(*b))
            .collect();
        (0..n)
            .map(|q| {
                if q == i1 || q == i2 {
                    m
                } else {
                    longest_run(rows[q], &lo, &hi)
                }
            })
            .collect()
    };
    let add = |mut acc: Vec<u64>, c: Vec<u64>| {
        acc.iter_mut().zip(c).for_each(|(a, b)| *a += b);
        acc
    };

    // Integer sums are order independent, so the parallel reduction is deterministic.
    if bands.len() * n * m as usize >= 1 << 20 {
        bands.par_iter().map(per_band).reduce(|| vec![0u64; n], add)
    } else {
        bands.iter().map(per_band).fold(vec![0u64; n], add)
    }
}

fn mei_count(x: &[f64], rows: &[&[f64]]) -> u64 {
    rows.iter()
        .map(|r| r.iter().zip(x).filter(|(v, xt)| v >= xt).count() as u64)
        .sum()
}

/// MEI of every sample member with respect to the whole sample.
pub fn mei_all(sample: &FunctionalSample) -> Result<Vec<f64>> {
    check_sample(None, sample, 1)?;
    let rows = sample.rows();
    let denom = (rows.len() * sample.grid().len()) as f64;
    Ok(rows
        .iter()
        .map(|x| mei_count(x, &rows) as f64 / denom)
        .collect())
}
