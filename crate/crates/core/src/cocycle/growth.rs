use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::evolve::{evolve_path, CocycleSource, DEFAULT_EVOLVE_TOL};
use super::generator::Generator;
use crate::algebra::{log_norm, operator_norm, C64};
use crate::dynamics::SemigroupModel;
use crate::error::{Error, Result};

/// Boundary nodes used for sampled suprema over a disk.
pub const BOUNDARY_NODES: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthGrid {
    pub t_values: Vec<f64>,
    pub nodes: usize,
}

impl Default for GrowthGrid {
    fn default() -> Self {
        Self { t_values: (0..=12).map(|i| 0.25 * i as f64).collect(), nodes: BOUNDARY_NODES }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSample {
    pub t: f64,
    pub z: C64,
    pub gamma_norm: f64,
    pub bound: f64,
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub center: C64,
    pub radius: f64,
    /// Sampled `sup μ(B(z))` over the disk boundary.
    pub k_mu: f64,
    /// Exponent used for the bound `e^{K t}`.
    pub k: f64,
    pub max_violation: f64,
    pub samples: Vec<GrowthSample>,
}

impl GrowthReport {
    /// CSV with header `t,z_re,z_im,gamma_norm,bound,violation`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,z_re,z_im,gamma_norm,bound,violation\n");
        for s in &self.samples {
            out.push_str(&format!("{},{},{},{},{},{}\n", s.t, s.z.re, s.z.im, s.gamma_norm, s.bound, s.violation));
        }
        out
    }
}

fn circle(center: C64, r: f64, nodes: usize) -> Vec<C64> {
    (0..nodes).map(|j| center + C64::from_polar(r, 2.0 * std::f64::consts::PI * j as f64 / nodes as f64)).collect()
}

/// `max μ(B(z))` over `nodes` points of the circle `|z − center| = r`.
pub fn sampled_log_norm_sup(b: &dyn Generator, center: C64, r: f64, nodes: usize) -> Result<f64> {
    if r <= 0.0 || center.norm() + r >= 1.0 {
        return Err(Error::InvalidInput(format!("disk of radius {r} is not inside the unit disk")));
    }
    let mus = circle(center, r, nodes)
        .into_par_iter()
        .map(|z| b.eval(z).and_then(|m| log_norm(&m)))
        .collect::<Result<Vec<_>>>()?;
    Ok(mus.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Samples `‖Γ_t(z)‖` against `e^{K t}` on the boundary of the disk
/// `|z − center| ≤ r` (center defaults to the interior fixed point, else 0).
pub fn growth_report(
    model: &SemigroupModel,
    b: &dyn Generator,
    center: Option<C64>,
    r: f64,
    k: Option<f64>,
    grid: &GrowthGrid,
) -> Result<GrowthReport> {
    let center = center.or(model.z0()).unwrap_or(C64::new(0.0, 0.0));
    let k_mu = sampled_log_norm_sup(b, center, r, grid.nodes)?;
    let k_used = k.unwrap_or(k_mu);
    let mut ts = grid.t_values.clone();
    ts.sort_by(f64::total_cmp);
    let slack = r * 1e-9 + 1e-12;
    let rows = circle(center, r, grid.nodes)
        .into_par_iter()
        .map(|z| -> Result<Vec<GrowthSample>> {
            for &t in &ts {
                if (model.flow(t, z)? - center).norm() > r + slack {
                    return Err(Error::NotInvariant { radius: r });
                }
            }
            let path = evolve_path(model, b, &ts, z, DEFAULT_EVOLVE_TOL)?;
            Ok(ts
                .iter()
                .zip(path)
                .map(|(&t, g)| {
                    let gamma_norm = operator_norm(&g);
                    let bound = (k_used * t).exp();
                    GrowthSample { t, z, gamma_norm, bound, violation: (gamma_norm - bound).max(0.0) }
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let samples: Vec<GrowthSample> = rows.into_iter().flatten().collect();
    let max_violation = samples.iter().map(|s| s.violation).fold(0.0, f64::max);
    Ok(GrowthReport { center, radius: r, k_mu, k: k_used, max_violation, samples })
}

/// Envelope fit `sup_z ‖Γ_t(z)‖ ≤ M e^{K t}` over sampled times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundednessFit {
    /// Smallest `M` making the envelope hold at every sample with slope `k`.
    pub m: f64,
    /// Least-squares slope of `log sup ‖Γ_t‖` against `t`.
    pub k: f64,
    /// Smallest `K` with `sup ‖Γ_t‖ ≤ e^{K t}` at every sample (`M = 1`).
    pub k_unit: f64,
    /// RMS residual of the least-squares line.
    pub residual: f64,
    /// Late secant slope over mid-range secant slope (floored at 0.5).
    pub acceleration: f64,
    pub unbounded: bool,
}

/// Acceleration above which growth is declared super-exponential.
pub const UNBOUNDED_ACCELERATION: f64 = 2.0;

/// Fits `log sup_z ‖Γ_t(z)‖ ≈ log M + K t` over `t_values` and flags
/// super-exponential growth.
pub fn boundedness_classify(source: &dyn CocycleSource, z_values: &[C64], t_values: &[f64]) -> Result<BoundednessFit> {
    let mut ts = t_values.to_vec();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    if ts.len() < 4 || z_values.is_empty() {
        return Err(Error::InvalidInput("need at least 4 times and one point".into()));
    }
    let sups = ts
        .par_iter()
        .map(|&t| {
            z_values
                .iter()
                .map(|&z| source.gamma(t, z).map(|g| operator_norm(&g)))
                .collect::<Result<Vec<_>>>()
                .map(|v| v.into_iter().fold(0.0, f64::max))
        })
        .collect::<Result<Vec<_>>>()?;
    if sups.iter().any(|s| !s.is_finite()) {
        return Ok(BoundednessFit {
            m: f64::INFINITY,
            k: f64::INFINITY,
            k_unit: f64::INFINITY,
            residual: f64::INFINITY,
            acceleration: f64::INFINITY,
            unbounded: true,
        });
    }
    let ys: Vec<f64> = sups.iter().map(|s| s.max(1e-300).ln()).collect();
    let n = ts.len() as f64;
    let tm = ts.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = ts.iter().map(|t| (t - tm).powi(2)).sum();
    let sxy: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - tm) * (y - ym)).sum();
    let k = sxy / sxx;
    let a = ym - k * tm;
    let residual = (ts.iter().zip(&ys).map(|(t, y)| (y - a - k * t).powi(2)).sum::<f64>() / n).sqrt();
    let m = ts.iter().zip(&ys).map(|(t, y)| (y - k * t).exp()).fold(0.0, f64::max);
    let k_unit = ts.iter().zip(&ys).filter(|(t, _)| **t > 0.0).map(|(t, y)| y / t).fold(0.0, f64::max);
    let last = ts.len() - 1;
    let mid = ts.len() / 2;
    let slope = |i: usize, j: usize| (ys[j] - ys[i]) / (ts[j] - ts[i]);
    let late = slope(last - 1, last);
    let middle = slope(mid - 1, mid);
    let acceleration = late / middle.max(0.5);
    Ok(BoundednessFit { m, k, k_unit, residual, acceleration, unbounded: acceleration > UNBOUNDED_ACCELERATION })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{CocycleGenerator, CocycleOracle};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn scalar_rational_growth_constant() {
        let model = SemigroupModel::linear(c(1.0));
        let b = CocycleGenerator::scalar(&[c(1.0)], &[c(1.0), c(-1.0)]).unwrap();
        let grid = GrowthGrid { t_values: vec![0.0, 0.5, 1.0, 2.0], nodes: 64 };
        let rep = growth_report(&model, &b, None, 0.5, None, &grid).unwrap();
        assert!((rep.k_mu - 2.0).abs() < 1e-6);
        assert!(rep.max_violation <= 1e-9);
        let csv = rep.to_csv();
        assert!(csv.starts_with("t,z_re,z_im,gamma_norm,bound,violation\n"));
        assert_eq!(csv.lines().count(), 1 + 4 * 64);
    }

    #[test]
    fn zero_generator_has_unit_norm() {
        let model = SemigroupModel::linear(c(1.0));
        let rep = growth_report(
            &model,
            &CocycleGenerator::zero(2),
            None,
            0.5,
            None,
            &GrowthGrid { t_values: vec![0.0, 1.0], nodes: 16 },
        )
        .unwrap();
        assert_eq!(rep.k_mu, 0.0);
        assert!(rep.samples.iter().all(|s| (s.gamma_norm - 1.0).abs() < 1e-12));
    }

    #[test]
    fn non_invariant_disk_is_rejected() {
        let affine = crate::dynamics::RationalMap::real(&[1.0, -1.0], &[1.0]).unwrap();
        let model = SemigroupModel::without_fixed_point(affine);
        let b = CocycleGenerator::scalar(&[c(1.0)], &[c(1.0), c(-1.0)]).unwrap();
        let grid = GrowthGrid { t_values: vec![0.0, 1.0], nodes: 8 };
        assert!(matches!(growth_report(&model, &b, None, 0.5, None, &grid), Err(Error::NotInvariant { .. })));
    }

    #[test]
    fn trivial_cocycle_fit() {
        let fit = boundedness_classify(&CocycleOracle::trivial(2), &[c(0.1)], &[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert!((fit.m - 1.0).abs() < 1e-15);
        assert_eq!(fit.k, 0.0);
        assert!(!fit.unbounded);
    }
}
