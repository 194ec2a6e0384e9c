//! Robust forecasting of hierarchical functional time series.
//!
//! Every node of a hierarchy carries a series of curves. A node is forecast
//! one step ahead by summing the moving functional medians (induced by the
//! modified or generalized band depth) of its children's series; leaves use
//! their own moving median. The crate also simulates FAR(1) and Wiener
//! hierarchies with outlier contamination and provides the usual depth-based
//! diagnostics: functional boxplots, outliergrams and scale curves.

pub mod depth;
pub mod error;
pub mod evaluate;
pub mod forecast;
pub mod grid;
pub mod hierarchy;
pub mod io;
pub mod series;
pub mod simulate;

pub use depth::{depths, depths_oracle, functional_median, gbd, mbd, mei, DepthKind, DepthVector};
pub use error::{Error, ErrorCategory, Result};
pub use evaluate::{
    functional_boxplot, level_report, mad_integrated, mafe, outliergram, scale_curve,
    BoxplotSummary, ErrorReport, OutliergramResult, ScaleCurve,
};
pub use forecast::{
    hierarchical_forecast, moving_mean_forecast, moving_median_forecast, rolling_backtest,
    Backtest, ForecastConfig, ForecastMethod, ForecastResult,
};
pub use grid::{integrate, Curve, Grid};
pub use hierarchy::{fill_internal_series, HierarchyData, HierarchySpec, NodeDecl};
pub use io::load_hierarchy;
pub use series::{sum_series, FunctionalSample, FunctionalTimeSeries};
pub use simulate::{build_hierarchy_dataset, RngSeed, SimulationSpec};
