use std::collections::BTreeMap;

use rand_distr::{Distribution, StandardNormal};

use hfts::evaluate::{level_report, median};
use hfts::forecast::{hierarchical_forecast, moving_median_forecast, rolling_backtest};
use hfts::hierarchy::{HierarchyData, HierarchySpec, NodeDecl};
use hfts::{Curve, DepthKind, ForecastConfig, FunctionalTimeSeries, Grid, RngSeed};

fn constant_series(grid: &Grid, values: &[f64]) -> FunctionalTimeSeries {
    FunctionalTimeSeries::new(
        grid.clone(),
        values
            .iter()
            .map(|&v| Curve::constant(grid.clone(), v).unwrap())
            .collect(),
    )
    .unwrap()
}

fn single(series: FunctionalTimeSeries) -> HierarchyData {
    let mut map = BTreeMap::new();
    map.insert("x".to_string(), series);
    HierarchyData::new(HierarchySpec::single("x"), map).unwrap()
}

fn service() -> HierarchySpec {
    HierarchySpec::new(vec![
        NodeDecl::new("whole", &["s1", "s2", "s3", "s4"]),
        NodeDecl::leaf("s1"),
        NodeDecl::leaf("s2"),
        NodeDecl::leaf("s3"),
        NodeDecl::leaf("s4"),
    ])
    .unwrap()
}

#[test]
fn root_forecast_is_sum_of_four_leaf_medians() {
    let grid = Grid::unit(24).unwrap();
    let mut rng = RngSeed(11).stream("test/service");
    let mut map = BTreeMap::new();
    for (i, id) in ["s1", "s2", "s3", "s4"].iter().enumerate() {
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| {
                (0..24)
                    .map(|_| {
                        10.0 * (i + 1) as f64 + {
                            let z: f64 = StandardNormal.sample(&mut rng);
                            z
                        }
                    })
                    .collect()
            })
            .collect();
        map.insert(
            id.to_string(),
            FunctionalTimeSeries::from_rows(grid.clone(), rows).unwrap(),
        );
    }
    let data = hfts::fill_internal_series(service(), map, &BTreeMap::new()).unwrap();
    for kind in [DepthKind::Mbd, DepthKind::Gbd] {
        let config = ForecastConfig::median(7, kind);
        let f = hierarchical_forecast(&data, 30, &config).unwrap();
        let mut expected = Curve::zeros(grid.clone());
        for id in ["s1", "s2", "s3", "s4"] {
            let leaf = moving_median_forecast(data.series(id).unwrap(), 30, 7, kind).unwrap();
            assert_eq!(f.get(id).unwrap(), &leaf);
            expected = expected.add(&leaf).unwrap();
        }
        assert_eq!(f.get("whole").unwrap(), &expected);
    }
}

#[test]
fn all_zero_hierarchy_forecasts_zero() {
    let grid = Grid::unit(5).unwrap();
    let map: BTreeMap<String, FunctionalTimeSeries> = ["s1", "s2", "s3", "s4"]
        .iter()
        .map(|id| {
            (
                id.to_string(),
                FunctionalTimeSeries::zeros(grid.clone(), 12),
            )
        })
        .collect();
    let data = hfts::fill_internal_series(service(), map, &BTreeMap::new()).unwrap();
    for config in [
        ForecastConfig::median(5, DepthKind::Mbd),
        ForecastConfig::mean(5),
    ] {
        let f = hierarchical_forecast(&data, 12, &config).unwrap();
        assert!(f
            .forecasts
            .values()
            .all(|c| c.values().iter().all(|&v| v == 0.0)));
    }
}

#[test]
fn backtest_occasion_count_and_errors() {
    let grid = Grid::unit(4).unwrap();
    let data = single(constant_series(&grid, &[3.0; 5]));
    let bt = rolling_backtest(&data, &ForecastConfig::median(3, DepthKind::Mbd)).unwrap();
    assert_eq!(
        bt.occasions.iter().map(|o| o.n).collect::<Vec<_>>(),
        vec![3, 4]
    );
    for e in bt.node_errors("x").unwrap() {
        assert!(e.values().iter().all(|&v| v == 0.0));
    }
    let report = level_report(&bt, data.spec()).unwrap();
    assert_eq!(report.node("x").unwrap().mafe, 0.0);

    let short = single(constant_series(&grid, &[1.0; 3]));
    let err = rolling_backtest(&short, &ForecastConfig::median(3, DepthKind::Mbd)).unwrap_err();
    assert_eq!(err.category().exit_code(), 3);
}

#[test]
fn median_of_signed_errors_is_near_zero() {
    let grid = Grid::unit(8).unwrap();
    let mut rng = RngSeed(5).stream("test/signed");
    let values: Vec<f64> = (0..1010).map(|_| StandardNormal.sample(&mut rng)).collect();
    let data = single(constant_series(&grid, &values));
    let bt = rolling_backtest(&data, &ForecastConfig::median(10, DepthKind::Mbd)).unwrap();
    assert_eq!(bt.len(), 1000);
    let signed: Vec<f64> = bt
        .node_errors("x")
        .unwrap()
        .iter()
        .map(|e| e.values()[0])
        .collect();
    assert!(median(&signed).abs() <= 0.15, "{}", median(&signed));
}

#[test]
fn forecasts_are_shift_and_scale_equivariant() {
    let grid = Grid::unit(12).unwrap();
    let mut rng = RngSeed(9).stream("test/equivariance");
    let map: BTreeMap<String, FunctionalTimeSeries> = ["s1", "s2", "s3", "s4"]
        .iter()
        .map(|id| {
            let rows: Vec<Vec<f64>> = (0..15)
                .map(|_| (0..12).map(|_| StandardNormal.sample(&mut rng)).collect())
                .collect();
            (
                id.to_string(),
                FunctionalTimeSeries::from_rows(grid.clone(), rows).unwrap(),
            )
        })
        .collect();
    let data = hfts::fill_internal_series(service(), map, &BTreeMap::new()).unwrap();
    for config in [
        ForecastConfig::median(6, DepthKind::Mbd),
        ForecastConfig::median(6, DepthKind::Gbd),
        ForecastConfig::mean(6),
    ] {
        let base = hierarchical_forecast(&data, 15, &config).unwrap();
        for (a, b) in [(1.0, 3.5), (2.5, 0.0)] {
            let moved = hierarchical_forecast(&data.affine(a, b).unwrap(), 15, &config).unwrap();
            for (id, curve) in &base.forecasts {
                // an internal forecast sums one shifted median per child
                let children = data.spec().children(id).unwrap().len().max(1);
                let expected = curve.affine(a, b * children as f64).unwrap();
                let got = moved.get(id).unwrap();
                let err = got.sub(&expected).unwrap().sup_norm();
                assert!(err <= 1e-9, "{id}: {err}");
            }
        }
    }
}
