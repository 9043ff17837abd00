use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::condition::resonance_bound;
use crate::algebra::{
    ad_matrix, log_norm, mat_exp, mat_inv, operator_norm, shifted_operator, sylvester_resolve_with, CMatrix, Svd,
    SylvesterKind, C64, RESONANCE_RTOL,
};
use crate::cocycle::{evolve, Generator, DEFAULT_EVOLVE_TOL};
use crate::dynamics::SemigroupModel;
use crate::error::{Error, Result};
use crate::series::{compose, MatrixSeries, Series, DEFAULT_ORDER};

/// Cap on `r` and on the radius estimate when coefficients vanish.
pub const R_CAP: f64 = 1e6;

/// Scaled singular values below this (and above the resonance threshold)
/// are reported as near-resonant.
pub const NEAR_RESONANT_RTOL: f64 = 1e-3;

/// Outcome of the coefficient recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearizationStatus {
    Linearizable,
    ResonantSolvable,
    Obstructed { at_order: usize },
    Coboundary,
}

impl fmt::Display for LinearizationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Linearizable => f.write_str("linearizable"),
            Self::ResonantSolvable => f.write_str("resonant_solvable"),
            Self::Obstructed { at_order } => write!(f, "obstructed({at_order})"),
            Self::Coboundary => f.write_str("coboundary"),
        }
    }
}

impl FromStr for LinearizationStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linearizable" => Ok(Self::Linearizable),
            "resonant_solvable" => Ok(Self::ResonantSolvable),
            "coboundary" => Ok(Self::Coboundary),
            _ => s
                .strip_prefix("obstructed(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|k| k.parse().ok())
                .map(|at_order| Self::Obstructed { at_order })
                .ok_or_else(|| Error::InvalidInput(format!("unknown status {s:?}"))),
        }
    }
}

impl Serialize for LinearizationStatus {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LinearizationStatus {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Uniform bound on `‖(kλ − ad_{B0})⁻¹‖` over non-resonant orders.
    pub c1: f64,
    /// `‖b_k‖ ≤ C2 / r^k` on the computed coefficients.
    pub c2: f64,
    pub c3: f64,
    pub r: f64,
    pub k_bound: usize,
    /// `‖m_N‖ ρ^N` with `ρ = min(0.8·radius, 1)`.
    pub tail_ratio: f64,
    /// Largest recursion residual over the produced coefficients.
    pub max_residual: f64,
    pub resonant_orders: Vec<usize>,
    pub near_resonant_orders: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearizationOutcome {
    pub status: LinearizationStatus,
    pub lambda: C64,
    pub z0: C64,
    pub b0: CMatrix,
    /// `m(w) = Σ m_k w^k`, `m_0 = I`, in the Kœnigs coordinate `w = h(z)`.
    pub m: MatrixSeries,
    pub radius_estimate: f64,
    pub diagnostics: Diagnostics,
    pub violated_k: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearizeOptions {
    pub order: usize,
    /// Coboundary threshold on `‖B0‖` and Sylvester residual tolerance.
    pub tol: f64,
    pub resonance_rtol: f64,
}

impl Default for LinearizeOptions {
    fn default() -> Self {
        Self { order: DEFAULT_ORDER, tol: 1e-9, resonance_rtol: RESONANCE_RTOL }
    }
}

/// `b(w) = B(h⁻¹(w))` about `w = 0`.
pub fn conjugated_generator(model: &SemigroupModel, b: &dyn Generator, order: usize) -> Result<MatrixSeries> {
    let k = model.koenigs_data()?;
    let outer = b.taylor(k.z0, order)?;
    let inner = k.koenigs_inv.truncate(order);
    compose(&outer, &inner)
}

/// Upper bound on `‖(kλ − ad_{B0})⁻¹‖` in the spectral norm.
///
/// Minimum of `√n / σ_min` and, when positive, `1 / (k Re λ − μ(B0) − μ(−B0))`.
fn resolvent_bound(b0: &CMatrix, lambda: C64, k: usize, mu_sum: f64) -> Result<(f64, f64)> {
    let n = b0.dim() as f64;
    let smin = Svd::new(&shifted_operator(k, lambda, b0))?.smallest();
    let mut bound = n.sqrt() / smin;
    let gap = k as f64 * lambda.re - mu_sum;
    if gap > 0.0 {
        bound = bound.min(1.0 / gap);
    }
    Ok((bound, smin))
}

/// Geometric fit `‖b_k‖ ≤ C2 / r^k`, maximizing `r / (C1·C2 + 1)` when a
/// single coefficient leaves `r` free.
fn fit_geometric(norms: &[(usize, f64)], c1: f64) -> (f64, f64) {
    match norms {
        [] => (0.0, R_CAP),
        [(1, c)] => (c * R_CAP, R_CAP),
        [(k, c)] => {
            let r = (1.0 / (c1 * c * (*k as f64 - 1.0))).powf(1.0 / *k as f64).min(R_CAP);
            (c * r.powi(*k as i32), r)
        }
        _ => {
            let n = norms.len() as f64;
            let xm = norms.iter().map(|(k, _)| *k as f64).sum::<f64>() / n;
            let ym = norms.iter().map(|(_, c)| c.ln()).sum::<f64>() / n;
            let sxx: f64 = norms.iter().map(|(k, _)| (*k as f64 - xm).powi(2)).sum();
            let sxy: f64 = norms.iter().map(|(k, c)| (*k as f64 - xm) * (c.ln() - ym)).sum();
            let r = (-sxy / sxx).exp().min(R_CAP);
            let c2 = norms.iter().map(|(k, c)| c * r.powi(*k as i32)).fold(0.0, f64::max);
            (c2, r)
        }
    }
}

/// Solves `(kλ − ad_{B0}) m_k = Σ_{l<k} m_l b_{k−l}` with `m_0 = I` and
/// classifies the outcome.
pub fn linearize(model: &SemigroupModel, b: &dyn Generator, opts: &LinearizeOptions) -> Result<LinearizationOutcome> {
    let kd = model.koenigs_data()?;
    let lambda = kd.lambda;
    if lambda.re <= 0.0 {
        return Err(Error::InvalidInput("linearization needs Re lambda > 0".into()));
    }
    let order = opts.order;
    let bs = conjugated_generator(model, b, order)?;
    let n = b.dim();
    let b0 = bs.coeffs[0].clone();
    let zero = C64::new(0.0, 0.0);

    let mut m = vec![CMatrix::identity(n)];
    let mut status = None;
    let mut resonant_orders = Vec::new();
    let mut near_resonant_orders = Vec::new();
    let mut max_residual = 0.0f64;
    for k in 1..=order {
        let mut rhs = CMatrix::zeros(n);
        for (l, ml) in m.iter().enumerate() {
            rhs += &(ml * &bs.coeffs[k - l]);
        }
        let out = sylvester_resolve_with(k, lambda, &b0, &rhs, opts.tol, opts.resonance_rtol)?;
        match out.kind {
            SylvesterKind::Obstructed => {
                resonant_orders.push(k);
                status = Some(LinearizationStatus::Obstructed { at_order: k });
                break;
            }
            SylvesterKind::ResonantSolvable => resonant_orders.push(k),
            SylvesterKind::Unique => {
                if out.scaled_singular_value <= NEAR_RESONANT_RTOL {
                    near_resonant_orders.push(k);
                }
            }
        }
        max_residual = max_residual.max(out.residual);
        m.push(out.solution.expect("solvable outcome carries a solution"));
    }
    let status = status.unwrap_or(if operator_norm(&b0) <= opts.tol {
        LinearizationStatus::Coboundary
    } else if !resonant_orders.is_empty() {
        LinearizationStatus::ResonantSolvable
    } else {
        LinearizationStatus::Linearizable
    });

    let k_bound = resonance_bound(&b0, lambda);
    let mu_sum = log_norm(&b0)? + log_norm(&b0.scale_real(-1.0))?;
    let k_max = order.max(2 * k_bound + 2);
    let bounds = (1..=k_max)
        .into_par_iter()
        .map(|k| resolvent_bound(&b0, lambda, k, mu_sum).map(|(bound, smin)| (k, bound, smin)))
        .collect::<Result<Vec<_>>>()?;
    let scale_ad = operator_norm(&ad_matrix(&b0));
    let c1 = bounds
        .iter()
        .filter(|(k, _, smin)| *smin > opts.resonance_rtol * ((lambda * *k as f64).norm() + scale_ad))
        .map(|(_, bound, _)| *bound)
        .fold(0.0, f64::max);

    let floor = 1e-13 * bs.max_coeff_norm().max(1.0);
    let norms: Vec<(usize, f64)> =
        bs.coeffs[1..].iter().enumerate().map(|(i, c)| (i + 1, operator_norm(c))).filter(|(_, c)| *c > floor).collect();
    let (c2, r) = fit_geometric(&norms, c1);
    let c3 = c1 * c2;
    let radius_estimate = match status {
        LinearizationStatus::Linearizable | LinearizationStatus::Coboundary => (r / (c3 + 1.0)).min(R_CAP),
        _ => 0.0,
    };
    let rho = (0.8 * radius_estimate).min(1.0);
    let last = m.last().expect("m_0 is always present");
    let tail_ratio = operator_norm(last) * rho.powi(m.len() as i32 - 1);

    let violated_k = (1..=k_bound)
        .filter(|&k| {
            bounds
                .iter()
                .find(|(kk, _, _)| *kk == k)
                .map(|(_, _, smin)| *smin <= opts.resonance_rtol * ((lambda * k as f64).norm() + scale_ad))
                .unwrap_or(false)
        })
        .collect();

    Ok(LinearizationOutcome {
        status,
        lambda,
        z0: kd.z0,
        b0,
        m: Series::new(zero, m),
        radius_estimate,
        diagnostics: Diagnostics {
            c1,
            c2,
            c3,
            r,
            k_bound,
            tail_ratio,
            max_residual,
            resonant_orders,
            near_resonant_orders,
        },
        violated_k,
    })
}

/// `M(F_t z)⁻¹ e^{t B0} M(z)`.
pub fn linearized_gamma(m_at_z: &CMatrix, m_at_ft: &CMatrix, b0: &CMatrix, t: f64) -> Result<CMatrix> {
    Ok(&(&mat_inv(m_at_ft)? * &mat_exp(&b0.scale_real(t))) * m_at_z)
}

impl LinearizationOutcome {
    /// Largest `|h(z)|` at which the transfer series may be evaluated.
    pub fn guard_radius(&self) -> f64 {
        0.8 * self.radius_estimate
    }

    /// `Γ_t(z)` rebuilt from the transfer series, refusing `|h(z)|` beyond the guard.
    pub fn reconstruct(&self, model: &SemigroupModel, t: f64, z: C64) -> Result<CMatrix> {
        let w = model.koenigs_eval(z)?;
        let limit = self.guard_radius();
        if w.norm() > limit {
            return Err(Error::OutsideConvergenceRegion { w_abs: w.norm(), limit });
        }
        let wt = w * (-self.lambda * t).exp();
        linearized_gamma(&self.m.evaluate(w), &self.m.evaluate(wt), &self.b0, t)
    }
}

/// `max ‖Γ_t(z) − M(F_t z)⁻¹ e^{t B0} M(z)‖` over `samples`, with `Γ` from [`evolve`].
pub fn reconstruct_error(
    model: &SemigroupModel,
    b: &dyn Generator,
    outcome: &LinearizationOutcome,
    samples: &[(f64, C64)],
) -> Result<f64> {
    if let LinearizationStatus::Obstructed { .. } = outcome.status {
        return Err(Error::InvalidInput("obstructed outcomes cannot be reconstructed".into()));
    }
    let errs = samples
        .par_iter()
        .map(|&(t, z)| {
            let rebuilt = outcome.reconstruct(model, t, z)?;
            let gamma = evolve(model, b, t, z, DEFAULT_EVOLVE_TOL)?;
            Ok(operator_norm(&(&gamma - &rebuilt)))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

/// Sample points `(t, z)` with `|h(z)|` inside the outcome's guard radius:
/// `z = h⁻¹(w)` for `w` on a circle of radius at most `fraction · guard`.
pub fn guarded_samples(
    model: &SemigroupModel,
    outcome: &LinearizationOutcome,
    t_values: &[f64],
    fraction: f64,
    angular: usize,
) -> Result<Vec<(f64, C64)>> {
    let kd = model.koenigs_data()?;
    let mut rho = fraction * (1.0 - 1e-9) * outcome.guard_radius().min(kd.koenigs_inv_radius);
    // Shrink until every node maps back inside the domain of `h`.
    for _ in 0..64 {
        let points = (0..angular)
            .map(|j| {
                let w = C64::from_polar(rho, 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / angular as f64);
                model.koenigs_inv_eval(w)
            })
            .collect::<Result<Vec<_>>>()?;
        let inside = points
            .iter()
            .all(|z| z.norm() < 1.0 && model.koenigs_eval(*z).is_ok_and(|w| w.norm() <= outcome.guard_radius()));
        if inside {
            return Ok(points.into_iter().flat_map(|z| t_values.iter().map(move |&t| (t, z))).collect());
        }
        rho *= 0.9;
    }
    Err(Error::OutsideConvergenceRegion { w_abs: rho, limit: outcome.guard_radius() })
}
