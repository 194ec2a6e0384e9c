//! Moving-window forecasters and the aggregated-median hierarchical forecast.
//!
//! Each node contributes a one-step estimate computed from its own last `k`
//! observations. A leaf is forecast by its own estimate; an internal node is
//! forecast by the sum of its children's estimates, each taken from the
//! child's observed series.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depth::{self, DepthKind};
use crate::error::{Error, Result};
use crate::grid::Curve;
use crate::hierarchy::{HierarchyData, HierarchySpec};
use crate::series::FunctionalTimeSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ForecastMethod {
    /// Sums of moving functional medians.
    #[default]
    AggregatedMedian,
    /// Sums of moving pointwise means.
    MovingMean,
}

impl fmt::Display for ForecastMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ForecastMethod::AggregatedMedian => "aggregated-median",
            ForecastMethod::MovingMean => "moving-mean",
        })
    }
}

impl FromStr for ForecastMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "aggregated-median" | "median" => Ok(ForecastMethod::AggregatedMedian),
            "moving-mean" | "mean" => Ok(ForecastMethod::MovingMean),
            other => Err(format!(
                "unknown method `{other}` (expected aggregated-median or moving-mean)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForecastConfig {
    /// Moving window length `k`.
    pub window: usize,
    pub depth: DepthKind,
    pub method: ForecastMethod,
}

impl ForecastConfig {
    pub fn new(window: usize, depth: DepthKind, method: ForecastMethod) -> Self {
        ForecastConfig {
            window,
            depth,
            method,
        }
    }

    pub fn median(window: usize, depth: DepthKind) -> Self {
        ForecastConfig::new(window, depth, ForecastMethod::AggregatedMedian)
    }

    pub fn mean(window: usize) -> Self {
        ForecastConfig::new(window, DepthKind::Mbd, ForecastMethod::MovingMean)
    }
}

impl Default for ForecastConfig {
    fn default() -> Self {
        ForecastConfig::median(10, DepthKind::Mbd)
    }
}

/// Functional median of `{x_{n-k+1}, ..., x_n}`, the forecast of `x_{n+1}`.
pub fn moving_median_forecast(
    series: &FunctionalTimeSeries,
    n: usize,
    k: usize,
    kind: DepthKind,
) -> Result<Curve> {
    let rows = series.window_rows(n, k)?;
    Curve::new(series.grid().clone(), depth::median_rows(&rows, kind))
}

/// Pointwise mean of `{x_{n-k+1}, ..., x_n}`.
pub fn moving_mean_forecast(series: &FunctionalTimeSeries, n: usize, k: usize) -> Result<Curve> {
    let rows = series.window_rows(n, k)?;
    Curve::new(series.grid().clone(), mean_rows(&rows))
}

fn mean_rows(rows: &[&[f64]]) -> Vec<f64> {
    let mut acc = vec![0.0; rows[0].len()];
    for r in rows {
        for (a, v) in acc.iter_mut().zip(r.iter()) {
            *a += v;
        }
    }
    let k = rows.len() as f64;
    acc.iter_mut().for_each(|a| *a /= k);
    acc
}

fn window_estimate(
    series: &FunctionalTimeSeries,
    n: usize,
    config: &ForecastConfig,
) -> Result<Vec<f64>> {
    let rows = series.window_rows(n, config.window)?;
    Ok(match config.method {
        ForecastMethod::AggregatedMedian => depth::median_rows(&rows, config.depth),
        ForecastMethod::MovingMean => mean_rows(&rows),
    })
}

/// One-step forecasts for every node of a hierarchy.
#[derive(Clone, Debug, PartialEq)]
pub struct ForecastResult {
    /// Number of observations the forecast is based on; the forecasts target `x_{n+1}`.
    pub n: usize,
    pub forecasts: BTreeMap<String, Curve>,
}

impl ForecastResult {
    pub fn get(&self, id: &str) -> Option<&Curve> {
        self.forecasts.get(id)
    }
}

/// Nodes whose own-window estimate enters some forecast.
fn estimated_nodes(spec: &HierarchySpec) -> Vec<bool> {
    let root = spec.idx(spec.root()).expect("root exists");
    (0..spec.len())
        .map(|i| i != root || spec.children_idx(i).is_empty())
        .collect()
}

fn assemble(
    spec: &HierarchySpec,
    estimates: &[Option<Vec<f64>>],
    data: &HierarchyData,
) -> Result<BTreeMap<String, Curve>> {
    let grid = data.grid();
    let mut out = BTreeMap::new();
    for i in 0..spec.len() {
        let kids = spec.children_idx(i);
        let values = if kids.is_empty() {
            estimates[i].clone().expect("leaf estimate computed")
        } else {
            let mut acc = vec![0.0; grid.len()];
            for &c in kids {
                let e = estimates[c].as_ref().expect("child estimate computed");
                for (a, v) in acc.iter_mut().zip(e) {
                    *a += v;
                }
            }
            acc
        };
        out.insert(spec.id_of(i).to_string(), Curve::new(grid.clone(), values)?);
    }
    Ok(out)
}

fn with_node(err: Error, id: &str) -> Error {
    match err {
        Error::InsufficientHistory { n, k, .. } => Error::InsufficientHistory {
            n,
            k,
            node: Some(id.to_string()),
        },
        other => other,
    }
}

/// Forecasts `x_{n+1}` at every node from the first `n` observations.
pub fn hierarchical_forecast(
    data: &HierarchyData,
    n: usize,
    config: &ForecastConfig,
) -> Result<ForecastResult> {
    let spec = data.spec();
    let needed = estimated_nodes(spec);
    let estimates = (0..spec.len())
        .into_par_iter()
        .map(|i| {
            if needed[i] {
                window_estimate(data.series_at(i), n, config)
                    .map(Some)
                    .map_err(|e| with_node(e, spec.id_of(i)))
            } else {
                Ok(None)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ForecastResult {
        n,
        forecasts: assemble(spec, &estimates, data)?,
    })
}

/// One forecast occasion of a rolling backtest.
#[derive(Clone, Debug, PartialEq)]
pub struct BacktestOccasion {
    pub n: usize,
    pub forecast: ForecastResult,
    /// The realized `x_{n+1}` at every node.
    pub actual: BTreeMap<String, Curve>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Backtest {
    pub config: ForecastConfig,
    pub occasions: Vec<BacktestOccasion>,
}

impl Backtest {
    pub fn len(&self) -> usize {
        self.occasions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occasions.is_empty()
    }

    /// Forecast and actual curves at one node, in occasion order.
    pub fn node_pairs(&self, id: &str) -> (Vec<&Curve>, Vec<&Curve>) {
        self.occasions
            .iter()
            .filter_map(|o| Some((o.forecast.get(id)?, o.actual.get(id)?)))
            .unzip()
    }

    /// Pointwise errors `actual - forecast` at one node.
    pub fn node_errors(&self, id: &str) -> Result<Vec<Curve>> {
        let (f, a) = self.node_pairs(id);
        f.iter().zip(a).map(|(f, a)| a.sub(f)).collect()
    }
}

/// Forecasts `x_{n+1}` for `n = k, ..., N-1` at every node and pairs each with the realization.
pub fn rolling_backtest(data: &HierarchyData, config: &ForecastConfig) -> Result<Backtest> {
    let k = config.window;
    let len = data.len();
    if k == 0 || len <= k {
        return Err(Error::InsufficientData { len, k });
    }
    let spec = data.spec();
    let needed = estimated_nodes(spec);

    // estimates[node][occasion]; nodes run in parallel, windows sequentially.
    let estimates = (0..spec.len())
        .into_par_iter()
        .map(|i| {
            if !needed[i] {
                return Ok(None);
            }
            (k..len)
                .map(|n| window_estimate(data.series_at(i), n, config))
                .collect::<Result<Vec<_>>>()
                .map(Some)
                .map_err(|e| with_node(e, spec.id_of(i)))
        })
        .collect::<Result<Vec<_>>>()?;

    let occasions = (k..len)
        .enumerate()
        .map(|(o, n)| {
            let at: Vec<Option<Vec<f64>>> = estimates
                .iter()
                .map(|e| e.as_ref().map(|v| v[o].clone()))
                .collect();
            let forecasts = assemble(spec, &at, data)?;
            let actual = data
                .iter()
                .map(|(id, s)| (id.to_string(), s.curves()[n].clone()))
                .collect();
            Ok(BacktestOccasion {
                n,
                forecast: ForecastResult { n, forecasts },
                actual,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Backtest {
        config: *config,
        occasions,
    })
}
