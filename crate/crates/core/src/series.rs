//! Truncated Taylor series with scalar or matrix coefficients.
//!
//! A series `s` of order `N` about `center` represents
//! `Σ_{k=0}^{N} c_k (z − center)^k`. Matrix coefficients multiply in the given
//! order, so products are non-commutative.

use serde::{Deserialize, Serialize};

use crate::algebra::{operator_norm, CMatrix, C64};
use crate::error::{Error, Result};

/// Tolerance used when comparing series centers.
const CENTER_TOL: f64 = 1e-12;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 24;

/// Coefficient ring of a series.
pub trait Coefficient: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, s: C64) -> Self;
    fn norm(&self) -> f64;
}

impl Coefficient for C64 {
    fn zero_like(&self) -> Self {
        C64::new(0.0, 0.0)
    }
    fn one_like(&self) -> Self {
        C64::new(1.0, 0.0)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, s: C64) -> Self {
        self * s
    }
    fn norm(&self) -> f64 {
        C64::norm(*self)
    }
}

impl Coefficient for CMatrix {
    fn zero_like(&self) -> Self {
        CMatrix::zeros(self.dim())
    }
    fn one_like(&self) -> Self {
        CMatrix::identity(self.dim())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, s: C64) -> Self {
        CMatrix::scale(self, s)
    }
    fn norm(&self) -> f64 {
        operator_norm(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series<T> {
    pub center: C64,
    pub coeffs: Vec<T>,
}

pub type ScalarSeries = Series<C64>;
pub type MatrixSeries = Series<CMatrix>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

fn same_center(a: C64, b: C64) -> Result<()> {
    if (a - b).norm() > CENTER_TOL {
        Err(Error::CenterMismatch)
    } else {
        Ok(())
    }
}

impl<T: Coefficient> Series<T> {
    pub fn new(center: C64, coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        Self { center, coeffs }
    }

    /// Constant series of the given order.
    pub fn constant(center: C64, value: T, order: usize) -> Self {
        let zero = value.zero_like();
        let mut coeffs = vec![zero; order + 1];
        coeffs[0] = value;
        Self { center, coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        let zero = coeffs[0].zero_like();
        coeffs.resize(order + 1, zero);
        Self { center: self.center, coeffs }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        arith(self, other, ArithOp::Add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        arith(self, other, ArithOp::Sub)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        arith(self, other, ArithOp::Mul)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { center: self.center, coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect() }
    }

    /// Multiplies each coefficient by a scalar series (coefficient-wise Cauchy product).
    pub fn mul_scalar_series(&self, s: &ScalarSeries) -> Result<Self> {
        same_center(self.center, s.center)?;
        let order = self.order().min(s.order());
        let zero = self.coeffs[0].zero_like();
        let coeffs = (0..=order)
            .map(|k| (0..=k).fold(zero.clone(), |acc, j| acc.add(&self.coeffs[j].scale(s.coeffs[k - j]))))
            .collect();
        Ok(Self { center: self.center, coeffs })
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn evaluate(&self, z: C64) -> T {
        let x = z - self.center;
        let mut acc = self.coeffs[self.order()].clone();
        for c in self.coeffs[..self.order()].iter().rev() {
            acc = acc.scale(x).add(c);
        }
        acc
    }

    /// Evaluation refusing points with `|z − center| > radius`.
    pub fn evaluate_guarded(&self, z: C64, radius: f64) -> Result<T> {
        let d = (z - self.center).norm();
        if d > radius {
            return Err(Error::OutsideConvergenceRegion { w_abs: d, limit: radius });
        }
        Ok(self.evaluate(z))
    }

    /// Term-by-term derivative; the order drops by one (but stays ≥ 0).
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::constant(self.center, self.coeffs[0].zero_like(), 0);
        }
        let coeffs = (1..=self.order()).map(|k| self.coeffs[k].scale(C64::new(k as f64, 0.0))).collect();
        Self { center: self.center, coeffs }
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Coefficientwise add/sub, or Cauchy product. The result has the smaller order.
pub fn arith<T: Coefficient>(a: &Series<T>, b: &Series<T>, op: ArithOp) -> Result<Series<T>> {
    same_center(a.center, b.center)?;
    let order = a.order().min(b.order());
    let coeffs = match op {
        ArithOp::Add => (0..=order).map(|k| a.coeffs[k].add(&b.coeffs[k])).collect(),
        ArithOp::Sub => (0..=order).map(|k| a.coeffs[k].sub(&b.coeffs[k])).collect(),
        ArithOp::Mul => {
            let zero = a.coeffs[0].zero_like();
            (0..=order)
                .map(|k| (0..=k).fold(zero.clone(), |acc, j| acc.add(&a.coeffs[j].mul(&b.coeffs[k - j]))))
                .collect()
        }
    };
    Ok(Series { center: a.center, coeffs })
}

/// `outer ∘ inner`, where `inner` maps a neighborhood of its center onto a
/// neighborhood of `outer.center`. The result is centered at `inner.center`.
pub fn compose<T: Coefficient>(outer: &Series<T>, inner: &ScalarSeries) -> Result<Series<T>> {
    same_center(outer.center, inner.coeffs[0])?;
    let order = outer.order().min(inner.order());
    // Inner displacement with zero constant term.
    let mut shifted = inner.truncate(order);
    shifted.coeffs[0] = C64::new(0.0, 0.0);
    let mut acc = Series::constant(inner.center, outer.coeffs[order].clone(), order);
    for c in outer.coeffs[..order].iter().rev() {
        let mut next = acc.mul_scalar_series(&shifted)?;
        next.coeffs[0] = next.coeffs[0].add(c);
        acc = next;
    }
    Ok(acc)
}

impl ScalarSeries {
    /// Identity map `z ↦ z` about `center`.
    pub fn identity(center: C64, order: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); order + 1];
        coeffs[0] = center;
        if order >= 1 {
            coeffs[1] = C64::new(1.0, 0.0);
        }
        Self { center, coeffs }
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if c0.norm() == 0.0 {
            return Err(Error::NotInvertible { linear: 0.0 });
        }
        let n = self.order();
        let mut out = vec![C64::new(0.0, 0.0); n + 1];
        out[0] = 1.0 / c0;
        for k in 1..=n {
            let s: C64 = (1..=k).map(|j| self.coeffs[j] * out[k - j]).sum();
            out[k] = -s / c0;
        }
        Ok(Self { center: self.center, coeffs: out })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.reciprocal()?)
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, k: usize) -> Result<Self> {
        let mut out = Series::constant(self.center, C64::new(1.0, 0.0), self.order());
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }
}

/// Compositional inverse of a scalar series with nonzero linear coefficient.
///
/// For `s(center + x) = c_0 + c_1 x + …` the result `g` is centered at `c_0`
/// with `g(c_0) = center` and `s ∘ g = id + O(w^{N+1})`. Computed by Newton
/// iteration, doubling the number of correct coefficients each step.
pub fn revert(s: &ScalarSeries) -> Result<ScalarSeries> {
    let order = s.order();
    let c1 = if order >= 1 { s.coeffs[1] } else { C64::new(0.0, 0.0) };
    let scale = s.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
    if c1.norm() <= 1e-12 * scale {
        return Err(Error::NotInvertible { linear: c1.norm() });
    }
    let zero = C64::new(0.0, 0.0);
    // ŝ(x) = s(center + x) − c_0, centered at 0.
    let mut s_hat = s.clone();
    s_hat.center = zero;
    s_hat.coeffs[0] = zero;
    let ds_hat = s_hat.derivative();

    // ĝ(y) = y / c_1 to first order.
    let mut g = vec![zero; order + 1];
    g[1] = 1.0 / c1;
    let mut g = Series { center: zero, coeffs: g };
    let mut prec = 1;
    while prec < order {
        prec = (2 * prec).min(order);
        let gp = g.truncate(prec);
        let sp = s_hat.truncate(prec);
        let composed = compose(&sp, &gp)?;
        let mut resid = composed;
        resid.coeffs[1] -= C64::new(1.0, 0.0);
        let dsp = ds_hat.truncate(prec);
        let slope = compose(&dsp, &gp)?;
        let step = resid.div(&slope)?;
        g = gp.sub(&step)?;
    }
    let mut coeffs = g.truncate(order).coeffs;
    coeffs[0] = s.center;
    Ok(Series { center: s.coeffs[0], coeffs })
}

/// Exponential of a series with zero constant term, from `E' = s' E`.
///
/// Matrix coefficients are assumed to commute; see the module notes.
pub fn series_exp<T: Coefficient>(s: &Series<T>) -> Result<Series<T>> {
    if s.coeffs[0].norm() != 0.0 {
        return Err(Error::NonzeroConstantTerm);
    }
    let n = s.order();
    let one = s.coeffs[0].one_like();
    let zero = s.coeffs[0].zero_like();
    let mut e = vec![zero.clone(); n + 1];
    e[0] = one;
    for k in 1..=n {
        let mut acc = zero.clone();
        for j in 1..=k {
            acc = acc.add(&s.coeffs[j].scale(C64::new(j as f64, 0.0)).mul(&e[k - j]));
        }
        e[k] = acc.scale(C64::new(1.0 / k as f64, 0.0));
    }
    Ok(Series { center: s.center, coeffs: e })
}

/// Shifts a polynomial (ascending coefficients in `z`) to powers of `z − center`.
pub fn taylor_shift(poly: &[C64], center: C64) -> Vec<C64> {
    let mut c = poly.to_vec();
    let n = c.len();
    // Repeated synthetic division.
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            let next = c[j + 1];
            c[j] += center * next;
        }
    }
    c
}

/// Shifts a matrix-coefficient polynomial to powers of `z − center`.
pub fn taylor_shift_matrix(poly: &[CMatrix], center: C64) -> Vec<CMatrix> {
    let mut c = poly.to_vec();
    let n = c.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            let next = c[j + 1].scale(center);
            c[j] += &next;
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn real(coeffs: &[f64]) -> ScalarSeries {
        Series::new(c(0.0), coeffs.iter().map(|&x| c(x)).collect())
    }

    fn assert_coeffs(s: &ScalarSeries, want: &[f64], tol: f64) {
        assert_eq!(s.order() + 1, want.len(), "order mismatch: {:?}", s.coeffs);
        for (k, (a, b)) in s.coeffs.iter().zip(want).enumerate() {
            assert!((a - c(*b)).norm() <= tol, "coefficient {k}: {a} vs {b}");
        }
    }

    #[test]
    fn product_of_conjugate_binomials() {
        let p = real(&[1.0, 1.0, 0.0]).mul(&real(&[1.0, -1.0, 0.0])).unwrap();
        assert_coeffs(&p, &[1.0, 0.0, -1.0], 0.0);
    }

    #[test]
    fn matrix_product_is_ordered() {
        let i2 = CMatrix::identity(2);
        let a = Series::new(c(0.0), vec![i2.clone(), CMatrix::unit(2, 0, 1)]);
        let b = Series::new(c(0.0), vec![i2.clone(), CMatrix::unit(2, 1, 0)]);
        let a = a.truncate(2);
        let b = b.truncate(2);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.coeffs[0], i2);
        assert_eq!(p.coeffs[1], &CMatrix::unit(2, 0, 1) + &CMatrix::unit(2, 1, 0));
        assert_eq!(p.coeffs[2], CMatrix::unit(2, 0, 0));
    }

    #[test]
    fn truncation_order_is_min() {
        let p = real(&[1.0, 2.0, 3.0]).mul(&real(&[1.0, 1.0, 1.0, 1.0])).unwrap();
        assert_eq!(p.order(), 2);
    }

    #[test]
    fn center_mismatch_rejected() {
        let a = real(&[1.0]);
        let b = Series::new(c(0.5), vec![c(1.0)]);
        assert_eq!(a.add(&b), Err(Error::CenterMismatch));
    }

    #[test]
    fn compose_examples() {
        let s = real(&[0.0, 1.0, 1.0, 0.0, 0.0]);
        let id = real(&[0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_coeffs(&compose(&id, &s).unwrap(), &[0.0, 1.0, 1.0, 0.0, 0.0], 1e-15);
        let sq = real(&[0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_coeffs(&compose(&sq, &s).unwrap(), &[0.0, 0.0, 1.0, 2.0, 1.0], 1e-15);
    }

    #[test]
    fn revert_examples() {
        assert_coeffs(&revert(&real(&[0.0, 1.0, 0.0])).unwrap(), &[0.0, 1.0, 0.0], 1e-15);
        assert_coeffs(&revert(&real(&[0.0, 2.0, 0.0, 0.0])).unwrap(), &[0.0, 0.5, 0.0, 0.0], 1e-15);
        // z/(1−z) inverts to w/(1+w).
        let n = 12;
        let h = real(&(0..=n).map(|k| if k == 0 { 0.0 } else { 1.0 }).collect::<Vec<_>>());
        let want: Vec<f64> = (0..=n)
            .map(|k| {
                if k == 0 {
                    0.0
                } else if k % 2 == 1 {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        assert_coeffs(&revert(&h).unwrap(), &want, 1e-12);
    }

    #[test]
    fn revert_rejects_flat_series() {
        assert!(matches!(revert(&real(&[0.0, 0.0, 1.0])), Err(Error::NotInvertible { .. })));
    }

    #[test]
    fn revert_with_offsets() {
        // s(z) = 2 + 3(z − 0.5) + (z − 0.5)^2 about 0.5; inverse maps 2 → 0.5.
        let s = Series::new(c(0.5), vec![c(2.0), c(3.0), c(1.0), c(0.0), c(0.0), c(0.0)]);
        let g = revert(&s).unwrap();
        assert_eq!(g.center, c(2.0));
        assert_eq!(g.coeffs[0], c(0.5));
        let back = compose(&s, &g).unwrap();
        assert_coeffs(&back, &[2.0, 1.0, 0.0, 0.0, 0.0, 0.0], 1e-12);
    }

    #[test]
    fn exp_examples() {
        assert_coeffs(&series_exp(&real(&[0.0, 0.0, 0.0])).unwrap(), &[1.0, 0.0, 0.0], 0.0);
        let e = series_exp(&real(&[0.0, 1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_coeffs(&e, &[1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0], 1e-15);
        // exp(w + w²) = 1 + w + 3/2 w² + 7/6 w³ + …
        let e = series_exp(&real(&[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert_coeffs(&e, &[1.0, 1.0, 1.5, 7.0 / 6.0], 1e-14);
        assert_eq!(series_exp(&real(&[1.0, 0.0])), Err(Error::NonzeroConstantTerm));
    }

    #[test]
    fn evaluate_examples() {
        let s = real(&[1.0, 1.0, 1.0]);
        assert_eq!(s.evaluate(c(1.0)), c(3.0));
        assert_eq!(s.evaluate(c(0.0)), c(1.0));
        // h(z) = z/(1−z) at 0.5 → 1, truncation error ≈ 0.5^41.
        let h = real(&(0..=40).map(|k| if k == 0 { 0.0 } else { 1.0 }).collect::<Vec<_>>());
        assert!((h.evaluate(c(0.5)) - c(1.0)).norm() < 1e-11);
        assert!(h.evaluate_guarded(c(0.9), 0.8).is_err());
    }

    #[test]
    fn taylor_shift_matches_binomial() {
        // z^2 about 1: 1 + 2(z−1) + (z−1)^2
        let shifted = taylor_shift(&[c(0.0), c(0.0), c(1.0)], c(1.0));
        assert_eq!(shifted, vec![c(1.0), c(2.0), c(1.0)]);
    }

    #[test]
    fn reciprocal_of_one_minus_z() {
        let r = real(&[1.0, -1.0, 0.0, 0.0]).reciprocal().unwrap();
        assert_coeffs(&r, &[1.0, 1.0, 1.0, 1.0], 0.0);
    }
}
