//! Forecast accuracy metrics and depth-based diagnostics.

use std::borrow::Borrow;
use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::depth::{self, DepthKind, DepthVector, TIE_TOLERANCE};
use crate::error::{Error, Result};
use crate::forecast::Backtest;
use crate::grid::{integrate, Curve};
use crate::hierarchy::HierarchySpec;
use crate::series::FunctionalSample;

fn check_pairs<F: Borrow<Curve>, A: Borrow<Curve>>(forecasts: &[F], actuals: &[A]) -> Result<()> {
    if forecasts.is_empty() || actuals.is_empty() {
        return Err(Error::EmptySample);
    }
    if forecasts.len() != actuals.len() {
        return Err(Error::Incompatible(format!(
            "{} forecasts for {} actuals",
            forecasts.len(),
            actuals.len()
        )));
    }
    let grid = forecasts[0].borrow().grid();
    for c in forecasts
        .iter()
        .map(Borrow::borrow)
        .chain(actuals.iter().map(Borrow::borrow))
    {
        c.grid().ensure_same(grid)?;
    }
    Ok(())
}

/// Mean absolute forecast error over all occasions and grid points.
pub fn mafe<F: Borrow<Curve>, A: Borrow<Curve>>(forecasts: &[F], actuals: &[A]) -> Result<f64> {
    check_pairs(forecasts, actuals)?;
    let m = forecasts[0].borrow().len();
    let total: f64 = forecasts
        .iter()
        .zip(actuals)
        .map(|(f, a)| {
            f.borrow()
                .values()
                .iter()
                .zip(a.borrow().values())
                .map(|(x, y)| (x - y).abs())
                .sum::<f64>()
        })
        .sum();
    Ok(total / (forecasts.len() * m) as f64)
}

/// Median absolute deviation (unscaled) of the integrated forecast differences.
pub fn mad_integrated<F: Borrow<Curve>, A: Borrow<Curve>>(
    forecasts: &[F],
    actuals: &[A],
) -> Result<f64> {
    check_pairs(forecasts, actuals)?;
    let d = forecasts
        .iter()
        .zip(actuals)
        .map(|(f, a)| integrate(&f.borrow().sub(a.borrow())?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(mad(&d))
}

/// Unscaled median absolute deviation from the median.
pub fn mad(values: &[f64]) -> f64 {
    let med = median(values);
    let dev: Vec<f64> = values.iter().map(|v| (v - med).abs()).collect();
    median(&dev)
}

/// Sample median; the mean of the two middle values for even lengths.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty slice");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Quantile by linear interpolation between order statistics (Hyndman–Fan type 7).
pub fn quantile(values: &[f64], p: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of an empty slice");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

/// Functional boxplot geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxplotSummary {
    pub lower: Curve,
    pub upper: Curve,
    pub median: Curve,
    pub fence_lower: Curve,
    pub fence_upper: Curve,
    /// Curves exiting a fence at one or more grid points.
    pub outliers: Vec<usize>,
    /// Curves forming the central region.
    pub central: Vec<usize>,
    pub depths: DepthVector,
}

impl BoxplotSummary {
    /// Columns `t, lower, median, upper, fence_lo, fence_hi`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Domain(format!("csv write failed: {e}"));
        w.write_record(["t", "lower", "median", "upper", "fence_lo", "fence_hi"])
            .map_err(io)?;
        let t = self.lower.grid().points();
        for (j, &tj) in t.iter().enumerate() {
            w.write_record(
                [
                    tj,
                    self.lower.values()[j],
                    self.median.values()[j],
                    self.upper.values()[j],
                    self.fence_lower.values()[j],
                    self.fence_upper.values()[j],
                ]
                .map(|v| v.to_string()),
            )
            .map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::Domain(format!("csv write failed: {e}")))?;
        Ok(())
    }
}

/// Functional boxplot: the central region is the envelope of the `⌈N/2⌉` deepest curves
/// (extended by any curve tied in depth with the last one admitted), fences lie
/// `fence_factor` region heights beyond it.
pub fn functional_boxplot(
    sample: &FunctionalSample,
    kind: DepthKind,
    fence_factor: f64,
) -> Result<BoxplotSummary> {
    if !fence_factor.is_finite() || fence_factor < 0.0 {
        return Err(Error::Domain(format!(
            "fence factor must be finite and non-negative, got {fence_factor}"
        )));
    }
    let depths = depth::depths(sample, kind)?;
    let n = sample.len();
    let ranking = depths.ranking();
    let take = n.div_ceil(2);
    let cutoff = depths.values()[ranking[take - 1]];
    let mut central: Vec<usize> = ranking
        .iter()
        .copied()
        .take_while(|&i| depths.values()[i] >= cutoff - TIE_TOLERANCE)
        .collect();
    central.sort_unstable();

    let (lower, upper) = sample.envelope_of(&central)?;
    let median = depth::functional_median(sample, kind)?;
    let height = upper.sub(&lower)?;
    let fence_lower = lower.combine(1.0, &height, -fence_factor)?;
    let fence_upper = upper.combine(1.0, &height, fence_factor)?;
    let outliers = sample
        .curves()
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            c.values()
                .iter()
                .zip(fence_lower.values().iter().zip(fence_upper.values()))
                .any(|(v, (lo, hi))| v < lo || v > hi)
        })
        .map(|(i, _)| i)
        .collect();

    Ok(BoxplotSummary {
        lower,
        upper,
        median,
        fence_lower,
        fence_upper,
        outliers,
        central,
        depths,
    })
}

/// `MBD ≤ a0 + a1·MEI + a2·MEI²`, with equality for curves that cross no other curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Parabola {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Parabola {
    /// Coefficients for a sample of `n` curves.
    ///
    /// A non-crossing curve lying on or below exactly `u` curves (itself included) has
    /// `MEI = u/N`, and every band contains it except those with both ends strictly above
    /// or strictly below: `C(N,2) - C(u-1,2) - C(N-u,2) = -u² + (N+1)u - 1` bands counted
    /// over `C(N,2)`. Substituting `u = N·MEI` gives the coefficients.
    pub fn for_sample_size(n: usize) -> Self {
        let n = n as f64;
        let scale = 2.0 / (n * (n - 1.0));
        Parabola {
            a0: -scale,
            a1: scale * (n + 1.0) * n,
            a2: -scale * n * n,
        }
    }

    pub fn eval(&self, mei: f64) -> f64 {
        self.a0 + self.a1 * mei + self.a2 * mei * mei
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutliergramResult {
    pub mei: Vec<f64>,
    pub mbd: Vec<f64>,
    /// Shape outlyingness `parabola(MEI_i) - MBD_i`.
    pub distance: Vec<f64>,
    pub parabola: Parabola,
    /// `Q3(d) + 1.5·IQR(d)`.
    pub threshold: f64,
    pub flagged: Vec<usize>,
}

impl OutliergramResult {
    /// Columns `index, mei, mbd, d, flagged`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Domain(format!("csv write failed: {e}"));
        w.write_record(["index", "mei", "mbd", "d", "flagged"])
            .map_err(io)?;
        for i in 0..self.mei.len() {
            w.write_record([
                i.to_string(),
                self.mei[i].to_string(),
                self.mbd[i].to_string(),
                self.distance[i].to_string(),
                self.flagged.binary_search(&i).is_ok().to_string(),
            ])
            .map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::Domain(format!("csv write failed: {e}")))?;
        Ok(())
    }
}

/// Outliergram: curves lying unusually far below the MEI–MBD parabola are shape outliers.
///
/// The parabola bound is exact for samples without ties at grid points; curves that
/// coincide at grid points can sit slightly above it.
pub fn outliergram(sample: &FunctionalSample) -> Result<OutliergramResult> {
    let n = sample.len();
    if n < 3 {
        return Err(Error::SampleTooSmall {
            required: 3,
            actual: n,
        });
    }
    let mbd: Vec<f64> = depth::depths(sample, DepthKind::Mbd)?.into();
    let mei = depth::mei_all(sample)?;
    let parabola = Parabola::for_sample_size(n);
    let distance: Vec<f64> = mei
        .iter()
        .zip(&mbd)
        .map(|(&e, &b)| parabola.eval(e) - b)
        .collect();
    let q1 = quantile(&distance, 0.25);
    let q3 = quantile(&distance, 0.75);
    let threshold = q3 + 1.5 * (q3 - q1);
    let flagged = distance
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > threshold)
        .map(|(i, _)| i)
        .collect();
    Ok(OutliergramResult {
        mei,
        mbd,
        distance,
        parabola,
        threshold,
        flagged,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleCurve {
    /// `(α, volume of the α-central region)` in the order requested.
    pub points: Vec<(f64, f64)>,
}

impl ScaleCurve {
    /// Columns `alpha, volume`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Domain(format!("csv write failed: {e}"));
        w.write_record(["alpha", "volume"]).map_err(io)?;
        for (a, v) in &self.points {
            w.write_record([a.to_string(), v.to_string()]).map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::Domain(format!("csv write failed: {e}")))?;
        Ok(())
    }
}

/// Number of curves in the α-central region, `⌈αN⌉` (guarded against rounding noise).
pub fn central_count(alpha: f64, n: usize) -> usize {
    let c = (alpha * n as f64 - 1e-9).ceil();
    (c.max(1.0) as usize).min(n)
}

/// Volume (integrated envelope height) of the α-central regions.
pub fn scale_curve(
    sample: &FunctionalSample,
    kind: DepthKind,
    alphas: &[f64],
) -> Result<ScaleCurve> {
    if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1], got {a}")));
    }
    let ranking = depth::depths(sample, kind)?.ranking();
    let points = alphas
        .iter()
        .map(|&alpha| {
            let take = central_count(alpha, sample.len());
            let (lo, hi) = sample.envelope_of(&ranking[..take])?;
            Ok((alpha, integrate(&hi.sub(&lo)?)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScaleCurve { points })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeError {
    pub id: String,
    /// Distance from the root.
    pub depth: usize,
    pub mafe: f64,
    pub mad: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelError {
    pub depth: usize,
    pub label: String,
    pub nodes: usize,
    /// Mean of the node MAFEs at this depth.
    pub mafe: f64,
}

/// Per-node and per-level accuracy of a backtest. Levels run from the bottom up.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorReport {
    pub nodes: Vec<NodeError>,
    pub levels: Vec<LevelError>,
    /// `actual - forecast` at each node, per occasion.
    #[serde(skip)]
    pub errors: BTreeMap<String, Vec<Curve>>,
}

impl ErrorReport {
    pub fn level(&self, label: &str) -> Option<&LevelError> {
        self.levels.iter().find(|l| l.label == label)
    }

    pub fn node(&self, id: &str) -> Option<&NodeError> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Level MAFEs from the bottom level to the top.
    pub fn level_mafes(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.mafe).collect()
    }

    /// One row per level, then one row per node: `scope, id, depth, label, mafe, mad`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Domain(format!("csv write failed: {e}"));
        w.write_record(["scope", "id", "depth", "label", "mafe", "mad"])
            .map_err(io)?;
        for l in &self.levels {
            w.write_record([
                "level".to_string(),
                String::new(),
                l.depth.to_string(),
                l.label.clone(),
                l.mafe.to_string(),
                String::new(),
            ])
            .map_err(io)?;
        }
        for n in &self.nodes {
            w.write_record([
                "node".to_string(),
                n.id.clone(),
                n.depth.to_string(),
                String::new(),
                n.mafe.to_string(),
                n.mad.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::Domain(format!("csv write failed: {e}")))?;
        Ok(())
    }
}

/// Row label of a hierarchy depth, counted from the bottom as in the MAFE tables.
pub fn level_label(depth: usize, max_depth: usize) -> String {
    if depth == 0 {
        "Top level".to_string()
    } else if depth == max_depth {
        "Bottom level".to_string()
    } else {
        format!("Level {}", max_depth - depth + 1)
    }
}

pub fn level_report(backtest: &Backtest, spec: &HierarchySpec) -> Result<ErrorReport> {
    let max_depth = spec.max_depth();
    let mut nodes = Vec::with_capacity(spec.len());
    let mut errors = BTreeMap::new();
    for id in spec.ids() {
        let (f, a) = backtest.node_pairs(id);
        nodes.push(NodeError {
            id: id.clone(),
            depth: spec.depth(id)?,
            mafe: mafe(&f, &a)?,
            mad: mad_integrated(&f, &a)?,
        });
        errors.insert(id.clone(), backtest.node_errors(id)?);
    }
    let levels = (0..=max_depth)
        .rev()
        .filter_map(|d| {
            let at: Vec<f64> = nodes
                .iter()
                .filter(|n| n.depth == d)
                .map(|n| n.mafe)
                .collect();
            (!at.is_empty()).then(|| LevelError {
                depth: d,
                label: level_label(d, max_depth),
                nodes: at.len(),
                mafe: at.iter().sum::<f64>() / at.len() as f64,
            })
        })
        .collect();
    Ok(ErrorReport {
        nodes,
        levels,
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn constants(values: &[f64], m: usize) -> FunctionalSample {
        FunctionalSample::from_rows(
            Grid::unit(m).unwrap(),
            values.iter().map(|&v| vec![v; m]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn mafe_examples() {
        let g = Grid::unit(7).unwrap();
        let f = vec![Curve::constant(g.clone(), 1.0).unwrap(); 3];
        let a = vec![Curve::constant(g.clone(), 3.0).unwrap(); 3];
        assert_eq!(mafe(&f, &f).unwrap(), 0.0);
        assert_eq!(mafe(&f, &a).unwrap(), 2.0);
        assert!(matches!(
            mafe::<Curve, Curve>(&[], &[]),
            Err(Error::EmptySample)
        ));
        assert!(mafe(&f[..2], &a).is_err());
        let other = vec![Curve::zeros(Grid::unit(8).unwrap()); 3];
        assert!(matches!(mafe(&f, &other), Err(Error::Incompatible(_))));
    }

    #[test]
    fn mad_examples() {
        assert_eq!(mad(&[1.0, 2.0, 100.0]), 1.0);
        assert_eq!(mad(&[4.0, 4.0, 4.0]), 0.0);
        assert_eq!(mad(&[-3.0]), 0.0);
        let g = Grid::unit(11).unwrap();
        let zero = Curve::zeros(g.clone());
        let forecasts: Vec<Curve> = [1.0, 2.0, 100.0]
            .iter()
            .map(|&d| Curve::constant(g.clone(), d).unwrap())
            .collect();
        let actuals = vec![zero.clone(); 3];
        assert_eq!(mad_integrated(&forecasts, &actuals).unwrap(), 1.0);
        assert_eq!(mad_integrated(&[&zero], &[&zero]).unwrap(), 0.0);
    }

    #[test]
    fn quantile_type7() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.25), 1.75);
        assert_eq!(quantile(&v, 0.75), 3.25);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert_eq!(median(&v), 2.5);
    }

    #[test]
    fn boxplot_of_constants() {
        let s = constants(&[1.0, 2.0, 3.0, 4.0, 5.0], 6);
        let b = functional_boxplot(&s, DepthKind::Mbd, 1.5).unwrap();
        assert_eq!(b.lower.values(), &[2.0; 6]);
        assert_eq!(b.upper.values(), &[4.0; 6]);
        assert_eq!(b.fence_lower.values(), &[-1.0; 6]);
        assert_eq!(b.fence_upper.values(), &[7.0; 6]);
        assert_eq!(b.median.values(), &[3.0; 6]);
        assert!(b.outliers.is_empty());

        let s = constants(&[1.0, 2.0, 3.0, 4.0, 5.0, 100.0], 6);
        let b = functional_boxplot(&s, DepthKind::Mbd, 1.5).unwrap();
        assert_eq!(b.outliers, vec![5]);
    }

    #[test]
    fn boxplot_of_two_curves() {
        let s = FunctionalSample::from_rows(
            Grid::unit(3).unwrap(),
            vec![vec![0.0, 1.0, 2.0], vec![2.0, 1.0, 0.0]],
        )
        .unwrap();
        let b = functional_boxplot(&s, DepthKind::Gbd, 1.5).unwrap();
        assert_eq!(b.lower.values(), &[0.0, 1.0, 0.0]);
        assert_eq!(b.upper.values(), &[2.0, 1.0, 2.0]);
        assert_eq!(b.median.values(), &[1.0, 1.0, 1.0]);
        assert!(b.outliers.is_empty());
        assert!(functional_boxplot(&s, DepthKind::Mbd, -1.0).is_err());
    }

    #[test]
    fn outliergram_non_crossing_is_on_parabola() {
        let s = constants(&[0.0, 1.0, 2.0, 3.0, 4.0], 10);
        let o = outliergram(&s).unwrap();
        assert!(
            o.distance.iter().all(|d| d.abs() <= 1e-9),
            "{:?}",
            o.distance
        );
        assert!(o.flagged.is_empty());
        assert!(matches!(
            outliergram(&constants(&[0.0, 1.0], 3)),
            Err(Error::SampleTooSmall { required: 3, .. })
        ));
    }

    #[test]
    fn scale_curve_examples() {
        let s = constants(&[0.0, 1.0, 2.0], 5);
        let sc = scale_curve(&s, DepthKind::Mbd, &[0.1, 0.5, 1.0]).unwrap();
        assert_eq!(sc.points[0], (0.1, 0.0));
        assert!((sc.points[2].1 - 2.0).abs() < 1e-15);
        assert!(sc.points[1].1 <= sc.points[2].1);
        assert!(scale_curve(&s, DepthKind::Mbd, &[0.0]).is_err());
        assert!(scale_curve(&s, DepthKind::Mbd, &[1.5]).is_err());
    }

    #[test]
    fn central_count_guards_rounding() {
        assert_eq!(central_count(0.3, 10), 3);
        assert_eq!(central_count(0.5, 5), 3);
        assert_eq!(central_count(0.01, 5), 1);
        assert_eq!(central_count(1.0, 7), 7);
    }

    #[test]
    fn level_labels() {
        assert_eq!(level_label(3, 3), "Bottom level");
        assert_eq!(level_label(2, 3), "Level 2");
        assert_eq!(level_label(1, 3), "Level 3");
        assert_eq!(level_label(0, 3), "Top level");
        assert_eq!(level_label(0, 0), "Top level");
    }
}
