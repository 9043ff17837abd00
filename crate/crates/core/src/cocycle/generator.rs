use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{CMatrix, C64};
use crate::error::{Error, Result};
use crate::quad::cauchy_taylor;
use crate::series::{taylor_shift, taylor_shift_matrix, MatrixSeries, ScalarSeries, Series};

/// A holomorphic map `B: 𝔻 → M_n(ℂ)` that can be evaluated and expanded.
pub trait Generator: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, z: C64) -> Result<CMatrix>;
    /// Taylor series about `center`, truncated at `order`.
    fn taylor(&self, center: C64, order: usize) -> Result<MatrixSeries>;
}

/// `B(z) = (Σ N_k z^k) / d(z)` with matrix numerator and scalar denominator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocycleGenerator {
    pub dim: usize,
    pub matrix_numerator: Vec<CMatrix>,
    pub scalar_denominator: Vec<C64>,
}

fn poly_eval(p: &[C64], z: C64) -> C64 {
    p.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
}

impl CocycleGenerator {
    pub fn new(matrix_numerator: Vec<CMatrix>, scalar_denominator: Vec<C64>) -> Result<Self> {
        let dim = matrix_numerator
            .first()
            .map(CMatrix::dim)
            .ok_or_else(|| Error::InvalidInput("generator numerator needs at least one coefficient".into()))?;
        if let Some(bad) = matrix_numerator.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        if scalar_denominator.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::InvalidInput("denominator is identically zero".into()));
        }
        Ok(Self { dim, matrix_numerator, scalar_denominator })
    }

    /// Matrix polynomial with denominator 1.
    pub fn polynomial(matrix_numerator: Vec<CMatrix>) -> Result<Self> {
        Self::new(matrix_numerator, vec![C64::new(1.0, 0.0)])
    }

    pub fn constant(b0: CMatrix) -> Self {
        let dim = b0.dim();
        Self { dim, matrix_numerator: vec![b0], scalar_denominator: vec![C64::new(1.0, 0.0)] }
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(CMatrix::zeros(dim))
    }

    /// Scalar rational generator `p(z)/q(z)` as a 1×1 matrix map.
    pub fn scalar(numerator: &[C64], denominator: &[C64]) -> Result<Self> {
        Self::new(numerator.iter().map(|&c| CMatrix::scalar(1, c)).collect(), denominator.to_vec())
    }
}

impl Generator for CocycleGenerator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, z: C64) -> Result<CMatrix> {
        let d = poly_eval(&self.scalar_denominator, z);
        if d.norm() <= 1e-300 {
            return Err(Error::PoleAt { re: z.re, im: z.im });
        }
        let mut acc = CMatrix::zeros(self.dim);
        for c in self.matrix_numerator.iter().rev() {
            acc = acc.scale(z);
            acc += c;
        }
        Ok(acc.scale(1.0 / d))
    }

    fn taylor(&self, center: C64, order: usize) -> Result<MatrixSeries> {
        let mut num = taylor_shift_matrix(&self.matrix_numerator, center);
        num.resize(order + 1, CMatrix::zeros(self.dim));
        num.truncate(order + 1);
        let mut den = taylor_shift(&self.scalar_denominator, center);
        den.resize(order + 1, C64::new(0.0, 0.0));
        den.truncate(order + 1);
        let den: ScalarSeries = Series::new(center, den);
        if den.coeffs[0].norm() <= 1e-300 {
            return Err(Error::PoleAt { re: center.re, im: center.im });
        }
        Series::new(center, num).mul_scalar_series(&den.reciprocal()?)
    }
}

type MatrixFn = dyn Fn(C64) -> Result<CMatrix> + Send + Sync;

/// Generator given by a holomorphic closure; Taylor coefficients come from
/// Cauchy integrals on a circle inside the region of holomorphy.
#[derive(Clone)]
pub struct AnalyticGenerator {
    pub label: String,
    dim: usize,
    eval: Arc<MatrixFn>,
    /// Distance from a center to the nearest singularity, as a function of the center.
    singular_distance: Arc<dyn Fn(C64) -> f64 + Send + Sync>,
}

impl AnalyticGenerator {
    pub fn new<F, D>(label: impl Into<String>, dim: usize, eval: F, singular_distance: D) -> Self
    where
        F: Fn(C64) -> Result<CMatrix> + Send + Sync + 'static,
        D: Fn(C64) -> f64 + Send + Sync + 'static,
    {
        Self { label: label.into(), dim, eval: Arc::new(eval), singular_distance: Arc::new(singular_distance) }
    }
}

impl fmt::Debug for AnalyticGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticGenerator").field("label", &self.label).field("dim", &self.dim).finish()
    }
}

impl Generator for AnalyticGenerator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, z: C64) -> Result<CMatrix> {
        (self.eval)(z)
    }

    fn taylor(&self, center: C64, order: usize) -> Result<MatrixSeries> {
        let rho = 0.5 * (self.singular_distance)(center);
        let nodes = (4 * (order + 1)).max(128);
        let coeffs = cauchy_taylor(|w| (self.eval)(w), center, rho, order, nodes)?;
        Ok(Series::new(center, coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn rational_eval_and_taylor() {
        // B = [[1, z], [0, 2]] / (1 − z)
        let g = CocycleGenerator::new(
            vec![CMatrix::from_real_diag(&[1.0, 2.0]), CMatrix::unit(2, 0, 1)],
            vec![c(1.0), c(-1.0)],
        )
        .unwrap();
        let z = c(0.5);
        let b = g.eval(z).unwrap();
        assert!((b[(0, 1)] - c(1.0)).norm() < 1e-15);
        let s = g.taylor(c(0.0), 5).unwrap();
        for k in 0..=5 {
            assert!((s.coeffs[k][(0, 0)] - c(1.0)).norm() < 1e-14);
            let want = if k == 0 { 0.0 } else { 1.0 };
            assert!((s.coeffs[k][(0, 1)] - c(want)).norm() < 1e-14);
        }
        let shifted = g.taylor(c(0.3), 20).unwrap();
        let w = c(0.35);
        assert!((&shifted.evaluate(w) - &g.eval(w).unwrap()).max_abs() < 1e-10);
    }

    #[test]
    fn analytic_taylor_matches_rational() {
        let a = AnalyticGenerator::new("geom", 1, |z| Ok(CMatrix::scalar(1, 1.0 / (1.0 - z))), |c| 1.0 - c.norm());
        let s = a.taylor(c(0.0), 10).unwrap();
        for v in &s.coeffs {
            assert!((v[(0, 0)] - c(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let r = CocycleGenerator::polynomial(vec![CMatrix::zeros(2), CMatrix::zeros(3)]);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }
}
