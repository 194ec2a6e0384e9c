#![allow(dead_code)]

use std::fs;
use std::path::Path;

use rand_distr::Distribution;

use hfts::simulate::{KernelKind, RngSeed};

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        loop {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                let (mut q0, mut q1) = (1.0, z);
                for k in 2..=n {
                    let q2 = ((2 * k - 1) as f64 * z * q1 - (k - 1) as f64 * q0) / k as f64;
                    q0 = q1;
                    q1 = q2;
                }
                let dq = n as f64 * (z * q1 - q0) / (z * z - 1.0);
                x[i] = -z;
                x[n - 1 - i] = z;
                w[i] = 2.0 / ((1.0 - z * z) * dq * dq);
                w[n - 1 - i] = w[i];
                break;
            }
        }
    }
    (x, w)
}

/// ∫∫_{[0,1]²} f(s,t)² ds dt, integrating the triangles s ≤ t and s ≥ t separately so the
/// integrand is smooth on each piece.
pub fn squared_kernel_integral(f: impl Fn(f64, f64) -> f64) -> f64 {
    let (x, w) = gauss_legendre(40);
    let mut total = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let t = 0.5 * (xi + 1.0);
        for (xj, wj) in x.iter().zip(&w) {
            // s in [0, t] and s in [t, 1]
            let s_lo = 0.5 * t * (xj + 1.0);
            let s_hi = t + 0.5 * (1.0 - t) * (xj + 1.0);
            total += 0.5 * wi * (0.5 * t * wj * f(s_lo, t).powi(2));
            total += 0.5 * wi * (0.5 * (1.0 - t) * wj * f(s_hi, t).powi(2));
        }
    }
    total
}

/// Independent numerical value of the constant giving `kind` Hilbert–Schmidt norm `target`.
pub fn quadrature_kernel_constant(kind: KernelKind, target: f64) -> f64 {
    let unit = match kind {
        KernelKind::SlopingS => squared_kernel_integral(|s, _| s),
        KernelKind::SlopingT => squared_kernel_integral(|_, t| t),
        KernelKind::Exponential => squared_kernel_integral(|s, t| (-(s - t).abs() / 2.0).exp()),
    };
    target / unit.sqrt()
}

pub fn sample_mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn sample_var(v: &[f64]) -> f64 {
    let m = sample_mean(v);
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
}

pub fn sample_cov(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (sample_mean(a), sample_mean(b));
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / (a.len() - 1) as f64
}

/// Four sub-services plus their total: `days` rows of 24 hourly counts each.
pub fn write_year_fixture(dir: &Path, seed: RngSeed, days: usize) {
    let mut rng = seed.stream("acceptance/fixture");
    let base = [120.0, 80.0, 45.0, 200.0];
    let mut leaves: Vec<Vec<Vec<f64>>> = vec![Vec::new(); 4];
    for day in 0..days {
        let season = 1.0 + 0.2 * (2.0 * std::f64::consts::PI * day as f64 / 365.0).sin();
        let weekly = if day % 7 >= 5 { 0.7 } else { 1.0 };
        for (i, b) in base.iter().enumerate() {
            let row = (0..24)
                .map(|h| {
                    let diurnal =
                        1.0 + 0.8 * (2.0 * std::f64::consts::PI * (h as f64 - 8.0) / 24.0).sin();
                    let lambda = (b * season * weekly * diurnal).max(1.0);
                    rand_distr::Poisson::new(lambda).unwrap().sample(&mut rng)
                })
                .collect();
            leaves[i].push(row);
        }
    }
    let total: Vec<Vec<f64>> = (0..days)
        .map(|d| {
            (0..24)
                .map(|h| leaves.iter().map(|l| l[d][h]).sum())
                .collect()
        })
        .collect();
    let write = |name: &str, rows: &[Vec<f64>]| {
        let text: String = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
                    + "\n"
            })
            .collect();
        fs::write(dir.join(name), text).unwrap();
    };
    for (i, l) in leaves.iter().enumerate() {
        write(&format!("sub{}.csv", i + 1), l);
    }
    write("total.csv", &total);
    let config = serde_json::json!({
        "nodes": [
            {"id": "total", "children": ["sub1", "sub2", "sub3", "sub4"], "data": "total.csv"},
            {"id": "sub1", "data": "sub1.csv"},
            {"id": "sub2", "data": "sub2.csv"},
            {"id": "sub3", "data": "sub3.csv"},
            {"id": "sub4", "data": "sub4.csv"}
        ],
        "params": {"window": 10, "depth": "mbd"}
    });
    fs::write(dir.join("hierarchy.json"), config.to_string()).unwrap();
}
