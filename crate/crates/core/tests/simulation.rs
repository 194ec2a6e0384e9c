mod common;

use statrs::distribution::{ContinuousCDF, Normal};

use hfts::evaluate::{functional_boxplot, outliergram};
use hfts::simulate::{
    contaminate, contamination_curve, far1_series, kernel_constant, wiener_path, ContaminationSpec,
    Far1Options, KernelKind, KernelSpec, LeafProcess, RngSeed, SimulationSpec,
};
use hfts::{build_hierarchy_dataset, DepthKind, FunctionalTimeSeries, Grid};

use common::{quadrature_kernel_constant, sample_cov, sample_mean, sample_var};

const SEED: RngSeed = RngSeed(7);

fn endpoints(n: usize) -> (Vec<f64>, Vec<f64>) {
    let grid = Grid::unit(101).unwrap();
    let mut rng = SEED.stream("test/wiener");
    let (mut half, mut end) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for _ in 0..n {
        let w = wiener_path(&grid, &mut rng);
        half.push(w.values()[50]);
        end.push(w.values()[100]);
    }
    (half, end)
}

#[test]
fn wiener_variance_and_covariance() {
    let (half, end) = endpoints(10_000);
    assert!(
        (sample_var(&end) - 1.0).abs() <= 0.05,
        "{}",
        sample_var(&end)
    );
    let cov = sample_cov(&half, &end);
    assert!((cov - 0.5).abs() <= 0.05, "{cov}");
}

#[test]
fn wiener_endpoint_passes_ks_test() {
    let (_, mut end) = endpoints(10_000);
    end.sort_by(f64::total_cmp);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let n = end.len() as f64;
    let d = end
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal.cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    // asymptotic critical value at level 0.01
    assert!(d < 1.628 / n.sqrt(), "D = {d}");
}

#[test]
fn kernel_constants_match_quadrature() {
    for kind in [
        KernelKind::SlopingS,
        KernelKind::SlopingT,
        KernelKind::Exponential,
    ] {
        for target in [0.0, 0.25, 0.5, 0.99] {
            let c = kernel_constant(kind, target).unwrap();
            assert!((c - quadrature_kernel_constant(kind, target)).abs() <= 1e-6);
        }
    }
    assert!(
        (kernel_constant(KernelKind::SlopingS, 0.5).unwrap() - 0.5 * 3f64.sqrt()).abs() < 1e-12
    );
    assert!((kernel_constant(KernelKind::Exponential, 0.5).unwrap() - 0.5829).abs() < 1e-4);
    assert!(kernel_constant(KernelKind::SlopingT, -0.1).is_err());
}

#[test]
fn contamination_variance_at_quarter() {
    let grid = Grid::unit(101).unwrap();
    let mut rng = SEED.stream("test/contamination");
    let v: Vec<f64> = (0..10_000)
        .map(|_| contamination_curve(&grid, &mut rng).values()[25])
        .collect();
    let var = sample_var(&v);
    assert!((var - 900.0).abs() <= 50.0, "{var}");
}

#[test]
fn planted_count_is_binomial() {
    let grid = Grid::unit(10).unwrap();
    let series = FunctionalTimeSeries::zeros(grid, 1000);
    let spec = ContaminationSpec::new(0.1).unwrap();
    let counts: Vec<f64> = (0..100)
        .map(|i| {
            let mut rng = SEED.replication(i).stream("test/planted");
            contaminate(&series, &spec, &mut rng).unwrap().1.len() as f64
        })
        .collect();
    let mean = sample_mean(&counts);
    assert!((mean - 100.0).abs() <= 10.0, "{mean}");
}

fn integrals(series: &FunctionalTimeSeries) -> Vec<f64> {
    series
        .curves()
        .iter()
        .map(|c| c.integrate().unwrap())
        .collect()
}

#[test]
fn far1_is_dependent_and_stationary() {
    let grid = Grid::unit(50).unwrap();
    let kernel = KernelSpec::with_norm(KernelKind::Exponential, 0.5).unwrap();
    let mut rng = SEED.stream("test/far1");
    let series = far1_series(&kernel, 10_000, &grid, &mut rng, Far1Options::default()).unwrap();
    let x = integrals(&series);
    let lag1 = sample_cov(&x[..x.len() - 1], &x[1..]);
    assert!(lag1 > 0.0, "{lag1}");
    let (a, b) = x.split_at(x.len() / 2);
    let ratio = sample_var(a) / sample_var(b);
    assert!((0.8..=1.25).contains(&ratio), "{ratio}");
}

#[test]
fn far1_rejects_nonstationary_kernel() {
    let grid = Grid::unit(10).unwrap();
    let kernel = KernelSpec::with_norm(KernelKind::SlopingS, 1.0).unwrap();
    let mut rng = SEED.stream("test/far1");
    let err = far1_series(&kernel, 5, &grid, &mut rng, Far1Options::default()).unwrap_err();
    assert_eq!(err.category().exit_code(), 4);
    let allowed = Far1Options {
        allow_nonstationary: true,
        ..Far1Options::default()
    };
    assert!(far1_series(&kernel, 5, &grid, &mut rng, allowed).is_ok());
}

#[test]
fn internal_node_errors_are_uncorrelated() {
    let spec = SimulationSpec {
        branching: vec![2, 2],
        leaf_process: LeafProcess::ScaledWiener { factor: 1.0 },
        n_obs: 10_000,
        grid_points: 20,
        ..SimulationSpec::default()
    };
    let ds = build_hierarchy_dataset(&spec, SEED).unwrap();
    let error_of = |id: &str| -> Vec<f64> {
        let own = ds.data.series(id).unwrap();
        let children: Vec<&FunctionalTimeSeries> = ds
            .data
            .spec()
            .children(id)
            .unwrap()
            .iter()
            .map(|c| ds.data.series(c).unwrap())
            .collect();
        let sum = hfts::sum_series(&children).unwrap();
        own.curves()
            .iter()
            .zip(sum.curves())
            .map(|(a, b)| a.sub(b).unwrap().integrate().unwrap())
            .collect()
    };
    let internal: Vec<String> = ds
        .data
        .spec()
        .internal_nodes()
        .iter()
        .map(|s| s.to_string())
        .collect();
    assert_eq!(internal.len(), 3);
    let errors: Vec<Vec<f64>> = internal.iter().map(|id| error_of(id)).collect();
    for i in 0..errors.len() {
        for j in i + 1..errors.len() {
            let r = sample_cov(&errors[i], &errors[j])
                / (sample_var(&errors[i]) * sample_var(&errors[j])).sqrt();
            assert!(r.abs() <= 0.05, "{} vs {}: {r}", internal[i], internal[j]);
        }
    }
}

#[test]
fn planted_outliers_are_detectable() {
    let spec = SimulationSpec::wiener().with_contamination(0.1);
    let ds = build_hierarchy_dataset(&spec, SEED).unwrap();
    let (mut found, mut planted) = (0, 0);
    for (leaf, indices) in &ds.planted {
        let sample = ds.data.series(leaf).unwrap().as_sample();
        let magnitude = functional_boxplot(sample, DepthKind::Mbd, 1.5)
            .unwrap()
            .outliers;
        let shape = outliergram(sample).unwrap().flagged;
        planted += indices.len();
        found += indices
            .iter()
            .filter(|i| magnitude.contains(i) || shape.contains(i))
            .count();
    }
    let recall = found as f64 / planted as f64;
    assert!(planted > 0 && recall >= 0.8, "{found}/{planted}");
}

#[test]
fn datasets_are_reproducible() {
    let spec = SimulationSpec::default().with_contamination(0.1);
    let a = build_hierarchy_dataset(&spec, SEED.replication(3)).unwrap();
    let b = build_hierarchy_dataset(&spec, SEED.replication(3)).unwrap();
    let c = build_hierarchy_dataset(&spec, SEED.replication(4)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.data, c.data);
    assert_eq!(a.data.spec().len(), 27);
    assert_eq!(a.data.len(), 100);
    assert_eq!(a.data.grid().len(), 100);
}
