use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::evolve::{evolve, CocycleSource};
use super::generator::Generator;
use crate::algebra::{mat_inv, operator_norm, smallest_singular_value, CMatrix, C64};
use crate::dynamics::{RationalMap, SemigroupModel};
use crate::error::{Error, Result};
use crate::quad::{adaptive_simpson, cauchy_derivative, cauchy_radius, CAUCHY_NODES};

/// Sample grid for the semicocycle axioms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomSample {
    pub t_values: Vec<f64>,
    pub s_values: Vec<f64>,
    pub z_values: Vec<C64>,
}

impl AxiomSample {
    /// Small default grid: `t, s ∈ {0, 0.3, 1}`, points on two circles.
    pub fn standard() -> Self {
        let mut z_values = vec![C64::new(0.0, 0.0)];
        for &r in &[0.3, 0.7] {
            for j in 0..4 {
                z_values.push(C64::from_polar(r, 0.4 + j as f64 * std::f64::consts::FRAC_PI_2));
            }
        }
        Self { t_values: vec![0.0, 0.3, 1.0], s_values: vec![0.0, 0.3, 1.0], z_values }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    /// `max ‖Γ_{t+s}(z) − Γ_t(F_s z) Γ_s(z)‖ / max(1, ‖Γ_{t+s}(z)‖)`.
    pub chain_rule_residual: f64,
    /// `max ‖Γ_0(z) − I‖`.
    pub identity_residual: f64,
    /// Smallest singular value over all evaluated `Γ_t(z)`.
    pub min_singular_value: f64,
    pub samples: usize,
    pub tol: f64,
    pub pass: bool,
}

/// Verifies the chain rule, `Γ_0 = I` and invertibility on a sample grid.
pub fn check_axioms(
    model: &SemigroupModel,
    source: &dyn CocycleSource,
    sample: &AxiomSample,
    tol: f64,
) -> Result<AxiomReport> {
    let n = source.dim();
    let identity = CMatrix::identity(n);
    let mut triples = Vec::new();
    for &t in &sample.t_values {
        for &s in &sample.s_values {
            for &z in &sample.z_values {
                triples.push((t, s, z));
            }
        }
    }
    let rows: Vec<(f64, f64)> = triples
        .par_iter()
        .map(|&(t, s, z)| -> Result<(f64, f64)> {
            let whole = source.gamma(t + s, z)?;
            let fz = model.flow(s, z)?;
            let split = &source.gamma(t, fz)? * &source.gamma(s, z)?;
            let res = operator_norm(&(&whole - &split)) / operator_norm(&whole).max(1.0);
            Ok((res, smallest_singular_value(&whole)?))
        })
        .collect::<Result<_>>()?;
    let identity_residual = sample
        .z_values
        .par_iter()
        .map(|&z| source.gamma(0.0, z).map(|g| operator_norm(&(&g - &identity))))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let chain_rule_residual = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let min_singular_value = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let pass = chain_rule_residual <= tol && identity_residual <= tol && min_singular_value > 0.0;
    Ok(AxiomReport { chain_rule_residual, identity_residual, min_singular_value, samples: rows.len(), tol, pass })
}

/// `‖f(z) Γ_t′(z) − B(F_t z) Γ_t(z) + Γ_t(z) B(z)‖` with `Γ_t′` from a Cauchy integral.
pub fn spatial_derivative_check(model: &SemigroupModel, b: &dyn Generator, t: f64, z: C64, tol: f64) -> Result<f64> {
    let fz = model.f.eval(z)?;
    if fz.norm() <= 1e-10 {
        return Err(Error::SamplePointIsFixedPoint);
    }
    let gamma = evolve(model, b, t, z, tol)?;
    let dgamma = cauchy_derivative(|w| evolve(model, b, t, w, tol), z, cauchy_radius(z), CAUCHY_NODES)?;
    let ft = model.flow(t, z)?;
    let lhs = dgamma.scale(fz);
    let rhs = &(&b.eval(ft)? * &gamma) - &(&gamma * &b.eval(z)?);
    Ok(operator_norm(&(&lhs - &rhs)))
}

/// Default starting time for generator extraction.
pub const DEFAULT_EXTRACT_T0: f64 = 0.1;

/// Quadrature tolerance for `V(t0, z) = ∫_0^{t0} Γ_s(z) ds`.
const EXTRACT_QUAD_TOL: f64 = 1e-12;

/// `B(z) = V(t0, z)⁻¹ [Γ_{t0}(z) − I − f(z) ∂_z V(t0, z)]`.
pub fn extract_generator(source: &dyn CocycleSource, f: &RationalMap, t0: f64, z: C64) -> Result<CMatrix> {
    if t0 <= 0.0 {
        return Err(Error::InvalidInput("t0 must be positive".into()));
    }
    if z.norm() >= 1.0 {
        return Err(Error::OutOfDomain { re: z.re, im: z.im });
    }
    let n = source.dim();
    let v_at = |w: C64| adaptive_simpson(|s| source.gamma(s, w), 0.0, t0, EXTRACT_QUAD_TOL);
    let v = v_at(z)?;
    if smallest_singular_value(&v)? <= 1e-3 * t0 {
        return Err(Error::VNotInvertible { t0 });
    }
    let v_inv = mat_inv(&v).map_err(|_| Error::VNotInvertible { t0 })?;
    let vz = cauchy_derivative(v_at, z, cauchy_radius(z), CAUCHY_NODES)?;
    let gamma = source.gamma(t0, z)?;
    let inner = &(&gamma - &CMatrix::identity(n)) - &vz.scale(f.eval(z)?);
    Ok(&v_inv * &inner)
}

/// [`extract_generator`] starting at `t0 = 0.1`, halving on `VNotInvertible`.
pub fn extract_generator_auto(source: &dyn CocycleSource, f: &RationalMap, z: C64) -> Result<CMatrix> {
    let mut t0 = DEFAULT_EXTRACT_T0;
    for _ in 0..20 {
        match extract_generator(source, f, t0, z) {
            Err(Error::VNotInvertible { .. }) => t0 *= 0.5,
            other => return other,
        }
    }
    Err(Error::VNotInvertible { t0 })
}
