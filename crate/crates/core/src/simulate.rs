//! Stochastic process generators: Wiener paths, FAR(1) series, the
//! contamination process and full simulated hierarchies.
//!
//! Randomness is drawn from named ChaCha streams derived from a single
//! 64-bit seed, so every generator is a pure function of (seed, stream name).

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Curve, Grid};
use crate::hierarchy::{fill_internal_series, HierarchyData, HierarchySpec};
use crate::series::{FunctionalSample, FunctionalTimeSeries};

/// Root seed from which named, independent random streams are derived.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// The random stream called `name`. Identical seed and name give identical output.
    pub fn stream(&self, name: &str) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(fnv1a(name.as_bytes()));
        rng
    }

    /// Seed of the `index`-th independent replication.
    pub fn replication(&self, index: u64) -> RngSeed {
        RngSeed(splitmix64(self.0 ^ splitmix64(index.wrapping_add(0x5eed))))
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Standard Wiener path on `grid`: `W(t_0) = 0` with independent `N(0, Δt)` increments.
pub fn wiener_path<R: Rng + ?Sized>(grid: &Grid, rng: &mut R) -> Curve {
    let t = grid.points();
    let mut values = Vec::with_capacity(t.len());
    let mut w = 0.0;
    values.push(w);
    for dt in t.windows(2).map(|p| p[1] - p[0]) {
        w += dt.sqrt() * normal(rng);
        values.push(w);
    }
    Curve::new(grid.clone(), values).expect("finite Wiener path")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    /// `k(s, t) = C·s`
    SlopingS,
    /// `k(s, t) = C·t`
    SlopingT,
    /// `k(s, t) = C·exp(-|s - t| / 2)`
    Exponential,
}

impl KernelKind {
    /// Hilbert–Schmidt norm over [0,1]² of the kernel with `C = 1`.
    pub fn unit_norm(self) -> f64 {
        match self {
            // ∫∫ s² ds dt = 1/3
            KernelKind::SlopingS | KernelKind::SlopingT => (1.0_f64 / 3.0).sqrt(),
            // ∫∫ exp(-|s - t|) ds dt = 2 ∫₀¹ (1 - u) e^{-u} du = 2/e
            KernelKind::Exponential => (2.0 / std::f64::consts::E).sqrt(),
        }
    }

    fn shape(self, s: f64, t: f64) -> f64 {
        match self {
            KernelKind::SlopingS => s,
            KernelKind::SlopingT => t,
            KernelKind::Exponential => (-(s - t).abs() / 2.0).exp(),
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelKind::SlopingS => "sloping-s",
            KernelKind::SlopingT => "sloping-t",
            KernelKind::Exponential => "exponential",
        })
    }
}

impl FromStr for KernelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sloping-s" => Ok(KernelKind::SlopingS),
            "sloping-t" => Ok(KernelKind::SlopingT),
            "exponential" => Ok(KernelKind::Exponential),
            other => Err(format!("unknown kernel `{other}`")),
        }
    }
}

/// Constant `C` giving the kernel of `kind` the Hilbert–Schmidt norm `target_norm`.
pub fn kernel_constant(kind: KernelKind, target_norm: f64) -> Result<f64> {
    if !target_norm.is_finite() || target_norm < 0.0 {
        return Err(Error::Domain(format!(
            "kernel norm must be a finite non-negative number, got {target_norm}"
        )));
    }
    Ok(target_norm / kind.unit_norm())
}

/// Bivariate kernel `k(s, t)` of the FAR(1) integral operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub constant: f64,
}

impl KernelSpec {
    pub fn with_norm(kind: KernelKind, norm: f64) -> Result<Self> {
        Ok(KernelSpec {
            kind,
            constant: kernel_constant(kind, norm)?,
        })
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        self.constant * self.kind.shape(s, t)
    }

    /// Hilbert–Schmidt norm over [0,1]².
    pub fn hs_norm(&self) -> f64 {
        self.constant.abs() * self.kind.unit_norm()
    }

    /// Trapezoidal discretization of `x ↦ ∫ k(s, t) x(s) ds` on `grid`.
    pub fn operator(&self, grid: &Grid) -> KernelOperator {
        let t = grid.points();
        let w = grid.trapezoid_weights();
        let m = t.len();
        let mut matrix = Vec::with_capacity(m * m);
        for &tj in t {
            for (si, wi) in t.iter().zip(&w) {
                matrix.push(wi * self.eval(*si, tj));
            }
        }
        KernelOperator {
            grid: grid.clone(),
            matrix,
        }
    }
}

/// Dense quadrature matrix of an integral operator, row `j` producing `Ψ(x)(t_j)`.
#[derive(Clone, Debug)]
pub struct KernelOperator {
    grid: Grid,
    matrix: Vec<f64>,
}

impl KernelOperator {
    pub fn apply(&self, x: &Curve) -> Result<Curve> {
        x.grid().ensure_same(&self.grid)?;
        let values = self.apply_values(x.values());
        Curve::new(self.grid.clone(), values)
    }

    fn apply_values(&self, x: &[f64]) -> Vec<f64> {
        let m = x.len();
        self.matrix
            .chunks_exact(m)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Far1Options {
    /// Initial iterations from `X_0 ≡ 0` that are discarded.
    pub burn_in: usize,
    /// Permit kernels with `‖k‖ ≥ 1`.
    pub allow_nonstationary: bool,
}

impl Default for Far1Options {
    fn default() -> Self {
        Far1Options {
            burn_in: 50,
            allow_nonstationary: false,
        }
    }
}

/// `n_obs` curves of `X_{n+1}(t) = ∫ k(s,t) X_n(s) ds + ε_{n+1}(t)` with Wiener innovations.
pub fn far1_series<R: Rng + ?Sized>(
    kernel: &KernelSpec,
    n_obs: usize,
    grid: &Grid,
    rng: &mut R,
    options: Far1Options,
) -> Result<FunctionalTimeSeries> {
    let norm = kernel.hs_norm();
    if norm >= 1.0 && !options.allow_nonstationary {
        return Err(Error::NonstationaryKernel { norm });
    }
    let op = kernel.operator(grid);
    let mut x = vec![0.0; grid.len()];
    let mut curves = Vec::with_capacity(n_obs);
    for step in 0..options.burn_in + n_obs {
        let eps = wiener_path(grid, rng);
        x = op
            .apply_values(&x)
            .into_iter()
            .zip(eps.values())
            .map(|(a, e)| a + e)
            .collect();
        if step >= options.burn_in {
            curves.push(Curve::new(grid.clone(), x.clone())?);
        }
    }
    FunctionalTimeSeries::new(grid.clone(), curves)
}

/// `f(t) = 60·W₁(t)·sin(2πt) + √2·W₂(t)·cos(2πt)` with independent Wiener paths.
pub fn contamination_curve<R: Rng + ?Sized>(grid: &Grid, rng: &mut R) -> Curve {
    let w1 = wiener_path(grid, rng);
    let w2 = wiener_path(grid, rng);
    let values = grid
        .points()
        .iter()
        .zip(w1.values().iter().zip(w2.values()))
        .map(|(&t, (a, b))| 60.0 * a * (2.0 * PI * t).sin() + SQRT_2 * b * (2.0 * PI * t).cos())
        .collect();
    Curve::new(grid.clone(), values).expect("finite contamination curve")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContaminationSpec {
    /// Probability that an observation is replaced by an outlier.
    pub fraction: f64,
}

impl ContaminationSpec {
    pub fn new(fraction: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::Domain(format!(
                "contamination fraction must lie in [0, 1], got {fraction}"
            )));
        }
        Ok(ContaminationSpec { fraction })
    }
}

/// Independently replaces each observation by a fresh contamination curve with
/// probability `spec.fraction`. Returns the new series and the replaced (0-based) indices.
pub fn contaminate<R: Rng + ?Sized>(
    series: &FunctionalTimeSeries,
    spec: &ContaminationSpec,
    rng: &mut R,
) -> Result<(FunctionalTimeSeries, Vec<usize>)> {
    let spec = ContaminationSpec::new(spec.fraction)?;
    let mut out = series.clone();
    let mut planted = Vec::new();
    for i in 0..series.len() {
        if rng.gen_bool(spec.fraction) {
            out.replace(i, contamination_curve(series.grid(), rng));
            planted.push(i);
        }
    }
    Ok((out, planted))
}

/// Gaussian curve with mean `mean(t)` and covariance `variance·exp(-decay·|s - t|)`.
///
/// The covariance is Markov, so the path is drawn exactly by an AR(1) recursion over the grid.
pub fn exp_covariance_curve<R: Rng + ?Sized>(
    grid: &Grid,
    mean: impl Fn(f64) -> f64,
    variance: f64,
    decay: f64,
    rng: &mut R,
) -> Curve {
    let t = grid.points();
    let sd = variance.sqrt();
    let mut z = sd * normal(rng);
    let mut values = Vec::with_capacity(t.len());
    values.push(mean(t[0]) + z);
    for w in t.windows(2) {
        let rho = (-decay * (w[1] - w[0])).exp();
        z = rho * z + sd * (1.0 - rho * rho).sqrt() * normal(rng);
        values.push(mean(w[1]) + z);
    }
    Curve::new(grid.clone(), values).expect("finite Gaussian curve")
}

/// The shape-outlier scenario: `n` curves around `sin(4πt)` with covariance
/// `0.2·exp(-0.8|s - t|)`, of which `round(fraction·n)` randomly placed curves are
/// centred on `sin(2πt + π/2)` instead. Returns the sample and the outlier indices, sorted.
pub fn shape_outlier_sample<R: Rng + ?Sized>(
    grid: &Grid,
    n: usize,
    fraction: f64,
    rng: &mut R,
) -> Result<(FunctionalSample, Vec<usize>)> {
    ContaminationSpec::new(fraction)?;
    let n_out = (fraction * n as f64).round() as usize;
    let mut outliers = index::sample(rng, n, n_out).into_vec();
    outliers.sort_unstable();
    let mut is_out = vec![false; n];
    outliers.iter().for_each(|&i| is_out[i] = true);
    let curves = is_out
        .iter()
        .map(|&o| {
            if o {
                exp_covariance_curve(grid, |t| (2.0 * PI * t + PI / 2.0).sin(), 0.2, 0.8, rng)
            } else {
                exp_covariance_curve(grid, |t| (4.0 * PI * t).sin(), 0.2, 0.8, rng)
            }
        })
        .collect();
    Ok((FunctionalSample::new(grid.clone(), curves)?, outliers))
}

/// Process generating the bottom-level series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeafProcess {
    Far1 {
        kernel: KernelKind,
        norm: f64,
    },
    /// i.i.d. curves `factor·W(t)`.
    ScaledWiener {
        factor: f64,
    },
}

impl Default for LeafProcess {
    fn default() -> Self {
        LeafProcess::Far1 {
            kernel: KernelKind::Exponential,
            norm: 0.5,
        }
    }
}

/// A full simulated hierarchy experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSpec {
    /// Children per node at each depth; `[2, 3, 3]` is the 27-node tree.
    pub branching: Vec<usize>,
    pub leaf_process: LeafProcess,
    /// Series length N.
    pub n_obs: usize,
    /// Points of the uniform grid over [0, 1].
    pub grid_points: usize,
    /// Scale of the Wiener error added at every internal node.
    pub error_scale: f64,
    /// Probability of replacing a leaf observation by an outlier.
    pub contamination: f64,
    pub burn_in: usize,
    pub replications: usize,
}

impl Default for SimulationSpec {
    fn default() -> Self {
        SimulationSpec {
            branching: vec![2, 3, 3],
            leaf_process: LeafProcess::default(),
            n_obs: 100,
            grid_points: 100,
            error_scale: 0.1,
            contamination: 0.0,
            burn_in: 50,
            replications: 30,
        }
    }
}

impl SimulationSpec {
    pub fn wiener() -> Self {
        SimulationSpec {
            leaf_process: LeafProcess::ScaledWiener { factor: 10.0 },
            ..SimulationSpec::default()
        }
    }

    pub fn with_contamination(mut self, fraction: f64) -> Self {
        self.contamination = fraction;
        self
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::unit(self.grid_points)
    }

    pub fn topology(&self) -> Result<HierarchySpec> {
        HierarchySpec::balanced(&self.branching)
    }

    fn validate(&self) -> Result<()> {
        if self.n_obs == 0 {
            return Err(Error::Domain("n_obs must be positive".into()));
        }
        if self.branching.contains(&0) {
            return Err(Error::InvalidHierarchy(
                "branching factors must be positive".into(),
            ));
        }
        if !self.error_scale.is_finite() {
            return Err(Error::Domain("error_scale must be finite".into()));
        }
        ContaminationSpec::new(self.contamination)?;
        Ok(())
    }
}

/// A simulated hierarchy plus the ground-truth outlier positions at each leaf.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulatedDataset {
    pub data: HierarchyData,
    /// 0-based indices of planted outliers, per leaf (leaves without outliers included).
    pub planted: BTreeMap<String, Vec<usize>>,
}

/// Generates leaf series, contaminates them, and synthesizes every internal node as the
/// sum of its children plus `error_scale·W` drawn fresh per time index.
pub fn build_hierarchy_dataset(spec: &SimulationSpec, seed: RngSeed) -> Result<SimulatedDataset> {
    spec.validate()?;
    let topology = spec.topology()?;
    let grid = spec.grid()?;
    let contamination = ContaminationSpec::new(spec.contamination)?;
    let kernel = match spec.leaf_process {
        LeafProcess::Far1 { kernel, norm } => Some(KernelSpec::with_norm(kernel, norm)?),
        LeafProcess::ScaledWiener { .. } => None,
    };

    let leaves: Vec<String> = topology.leaves().iter().map(|s| s.to_string()).collect();
    let generated = leaves
        .par_iter()
        .map(|id| {
            let mut rng = seed.stream(&format!("leaf/{id}"));
            let clean = match (spec.leaf_process, &kernel) {
                (LeafProcess::Far1 { .. }, Some(k)) => far1_series(
                    k,
                    spec.n_obs,
                    &grid,
                    &mut rng,
                    Far1Options {
                        burn_in: spec.burn_in,
                        allow_nonstationary: false,
                    },
                )?,
                (LeafProcess::ScaledWiener { factor }, _) => {
                    let curves = (0..spec.n_obs)
                        .map(|_| wiener_path(&grid, &mut rng).affine(factor, 0.0))
                        .collect::<Result<Vec<_>>>()?;
                    FunctionalTimeSeries::new(grid.clone(), curves)?
                }
                _ => unreachable!("kernel is built for FAR(1) leaves"),
            };
            let mut crng = seed.stream(&format!("contamination/{id}"));
            let (series, planted) = contaminate(&clean, &contamination, &mut crng)?;
            Ok((id.clone(), series, planted))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut observed = BTreeMap::new();
    let mut planted = BTreeMap::new();
    for (id, series, idx) in generated {
        observed.insert(id.clone(), series);
        planted.insert(id, idx);
    }

    let mut errors = BTreeMap::new();
    if spec.error_scale != 0.0 {
        for id in topology.internal_nodes() {
            let mut rng = seed.stream(&format!("error/{id}"));
            let curves = (0..spec.n_obs)
                .map(|_| wiener_path(&grid, &mut rng).affine(spec.error_scale, 0.0))
                .collect::<Result<Vec<_>>>()?;
            errors.insert(
                id.to_string(),
                FunctionalTimeSeries::new(grid.clone(), curves)?,
            );
        }
    }

    let data = fill_internal_series(topology, observed, &errors)?;
    Ok(SimulatedDataset { data, planted })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let seed = RngSeed(42);
        let a: Vec<u64> = (0..4).map(|_| seed.stream("x").gen()).collect();
        let mut r1 = seed.stream("x");
        let mut r2 = seed.stream("x");
        let mut r3 = seed.stream("y");
        let v1: u64 = r1.gen();
        assert_eq!(v1, r2.gen::<u64>());
        assert_ne!(v1, r3.gen::<u64>());
        assert!(a.iter().all(|&v| v == a[0]));
        assert_ne!(seed.replication(0), seed.replication(1));
    }

    #[test]
    fn wiener_starts_at_zero() {
        let g = Grid::unit(50).unwrap();
        for s in 0..5 {
            let w = wiener_path(&g, &mut RngSeed(s).stream("w"));
            assert_eq!(w.values()[0], 0.0);
        }
    }

    #[test]
    fn kernel_constants() {
        let c = kernel_constant(KernelKind::SlopingS, 0.5).unwrap();
        assert!((c - 0.5 * 3.0_f64.sqrt()).abs() < 1e-15);
        assert!((kernel_constant(KernelKind::SlopingT, 0.5).unwrap() - c).abs() < 1e-15);
        let e = kernel_constant(KernelKind::Exponential, 0.5).unwrap();
        assert!((e - 0.5829).abs() < 1e-4);
        assert_eq!(kernel_constant(KernelKind::Exponential, 0.0).unwrap(), 0.0);
        assert!(matches!(
            kernel_constant(KernelKind::SlopingS, -0.1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn operator_on_constant_one_with_sloping_s() {
        let g = Grid::unit(100).unwrap();
        let k = KernelSpec::with_norm(KernelKind::SlopingS, 0.5).unwrap();
        let out = k
            .operator(&g)
            .apply(&Curve::constant(g.clone(), 1.0).unwrap())
            .unwrap();
        // C ∫ s ds = C / 2, exact under the trapezoid rule.
        for v in out.values() {
            assert!((v - 0.4330127).abs() < 1e-6);
        }
    }

    #[test]
    fn far1_rejects_nonstationary_kernel() {
        let g = Grid::unit(10).unwrap();
        let k = KernelSpec::with_norm(KernelKind::Exponential, 1.0).unwrap();
        let mut rng = RngSeed(1).stream("far");
        assert!(matches!(
            far1_series(&k, 5, &g, &mut rng, Far1Options::default()),
            Err(Error::NonstationaryKernel { .. })
        ));
        let opts = Far1Options {
            allow_nonstationary: true,
            ..Far1Options::default()
        };
        assert_eq!(far1_series(&k, 5, &g, &mut rng, opts).unwrap().len(), 5);
    }

    #[test]
    fn far1_with_zero_kernel_is_pure_innovation() {
        let g = Grid::unit(20).unwrap();
        let k = KernelSpec {
            kind: KernelKind::Exponential,
            constant: 0.0,
        };
        let opts = Far1Options {
            burn_in: 3,
            ..Far1Options::default()
        };
        let s = far1_series(&k, 4, &g, &mut RngSeed(9).stream("s"), opts).unwrap();
        let mut rng = RngSeed(9).stream("s");
        let paths: Vec<Curve> = (0..7).map(|_| wiener_path(&g, &mut rng)).collect();
        assert_eq!(s.curves(), &paths[3..]);
    }

    #[test]
    fn contamination_curve_zeros() {
        let g = Grid::unit(101).unwrap();
        let mut rng = RngSeed(3).stream("c");
        let f = contamination_curve(&g, &mut rng);
        assert_eq!(f.values()[0], 0.0);
        // At t = 0.5 only the cosine term survives: f(0.5) = -√2·W₂(0.5).
        let mut rng = RngSeed(3).stream("c");
        let _w1 = wiener_path(&g, &mut rng);
        let w2 = wiener_path(&g, &mut rng);
        let expected = -SQRT_2 * w2.values()[50];
        assert!((f.values()[50] - expected).abs() < 1e-9 * (1.0 + expected.abs()));
    }

    #[test]
    fn contaminate_extremes() {
        let g = Grid::unit(10).unwrap();
        let s = FunctionalTimeSeries::zeros(g, 20);
        let mut rng = RngSeed(4).stream("c");
        let (out, idx) = contaminate(&s, &ContaminationSpec::new(0.0).unwrap(), &mut rng).unwrap();
        assert_eq!(out, s);
        assert!(idx.is_empty());
        let (out, idx) = contaminate(&s, &ContaminationSpec::new(1.0).unwrap(), &mut rng).unwrap();
        assert_eq!(idx, (0..20).collect::<Vec<_>>());
        assert!(out.curves().iter().all(|c| c.sup_norm() > 0.0));
        assert!(ContaminationSpec::new(1.5).is_err());
    }

    #[test]
    fn zero_error_dataset_telescopes() {
        let spec = SimulationSpec {
            n_obs: 12,
            grid_points: 16,
            error_scale: 0.0,
            burn_in: 5,
            ..SimulationSpec::default()
        };
        let ds = build_hierarchy_dataset(&spec, RngSeed(7)).unwrap();
        let leaves: Vec<&FunctionalTimeSeries> = ds
            .data
            .spec()
            .leaves()
            .iter()
            .map(|id| ds.data.series(id).unwrap())
            .collect();
        let total = crate::series::sum_series(&leaves).unwrap();
        let root = ds.data.series("H").unwrap();
        for (a, b) in total.curves().iter().zip(root.curves()) {
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
            }
        }
        assert!(ds.planted.values().all(Vec::is_empty));
    }

    #[test]
    fn default_dataset_shape_and_determinism() {
        let spec = SimulationSpec::default();
        let a = build_hierarchy_dataset(&spec, RngSeed(11)).unwrap();
        let b = build_hierarchy_dataset(&spec, RngSeed(11)).unwrap();
        assert_eq!(a.data.spec().len(), 27);
        assert_eq!(a.data.len(), 100);
        assert_eq!(a.data.grid().len(), 100);
        assert_eq!(a, b);
        let c = build_hierarchy_dataset(&spec, RngSeed(12)).unwrap();
        assert_ne!(a.data, c.data);
    }

    #[test]
    fn contamination_does_not_perturb_other_streams() {
        let clean = build_hierarchy_dataset(&SimulationSpec::wiener(), RngSeed(5)).unwrap();
        let dirty = build_hierarchy_dataset(
            &SimulationSpec::wiener().with_contamination(0.1),
            RngSeed(5),
        )
        .unwrap();
        for (id, idx) in &dirty.planted {
            let a = clean.data.series(id).unwrap();
            let b = dirty.data.series(id).unwrap();
            for i in 0..a.len() {
                assert_eq!(a.curves()[i] == b.curves()[i], !idx.contains(&i));
            }
        }
    }
}
