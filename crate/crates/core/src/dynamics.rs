//! One-parameter semigroups on the unit disk generated by rational vector
//! fields, with their Kœnigs linearization about an interior fixed point.

use serde::{Deserialize, Serialize};

use crate::algebra::C64;
use crate::error::{Error, Result};
use crate::ode::{integrate, OdeOptions};
use crate::series::{revert, ScalarSeries, Series, DEFAULT_ORDER};

/// Default local error tolerance for trajectory integration.
pub const DEFAULT_FLOW_TOL: f64 = 1e-12;

/// Series evaluations whose estimated tail exceeds this are routed to the ODE path.
const SERIES_TAIL_TOL: f64 = 1e-13;

/// Safety factor applied to the ratio-test radius.
const RADIUS_SAFETY: f64 = 0.8;

/// Fixed points closer than this to the unit circle count as boundary points.
const BOUNDARY_MARGIN: f64 = 1e-6;

/// Quotient of two polynomials with ascending complex coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalMap {
    pub numerator: Vec<C64>,
    pub denominator: Vec<C64>,
}

fn poly_eval(p: &[C64], z: C64) -> C64 {
    p.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn poly_deriv(p: &[C64]) -> Vec<C64> {
    if p.len() <= 1 {
        return vec![C64::new(0.0, 0.0)];
    }
    p.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
}

impl RationalMap {
    pub fn new(numerator: Vec<C64>, denominator: Vec<C64>) -> Result<Self> {
        if numerator.is_empty() {
            return Err(Error::InvalidInput("empty numerator".into()));
        }
        if denominator.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::InvalidInput("denominator is identically zero".into()));
        }
        Ok(Self { numerator, denominator })
    }

    pub fn polynomial(coeffs: Vec<C64>) -> Self {
        Self { numerator: coeffs, denominator: vec![C64::new(1.0, 0.0)] }
    }

    /// Convenience constructor from real polynomial coefficients.
    pub fn real(numerator: &[f64], denominator: &[f64]) -> Result<Self> {
        Self::new(
            numerator.iter().map(|&x| C64::new(x, 0.0)).collect(),
            denominator.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        let d = poly_eval(&self.denominator, z);
        if d.norm() <= 1e-300 {
            return Err(Error::PoleAt { re: z.re, im: z.im });
        }
        Ok(poly_eval(&self.numerator, z) / d)
    }

    pub fn derivative(&self, z: C64) -> Result<C64> {
        let p = poly_eval(&self.numerator, z);
        let q = poly_eval(&self.denominator, z);
        if q.norm() <= 1e-300 {
            return Err(Error::PoleAt { re: z.re, im: z.im });
        }
        let dp = poly_eval(&poly_deriv(&self.numerator), z);
        let dq = poly_eval(&poly_deriv(&self.denominator), z);
        Ok((dp * q - p * dq) / (q * q))
    }

    /// Taylor series about `center`, truncated at `order`.
    pub fn taylor(&self, center: C64, order: usize) -> Result<ScalarSeries> {
        let num = crate::series::taylor_shift(&self.numerator, center);
        let den = crate::series::taylor_shift(&self.denominator, center);
        let pad = |mut v: Vec<C64>| {
            v.resize(order + 1, C64::new(0.0, 0.0));
            v
        };
        let num = Series::new(center, pad(num));
        let den = Series::new(center, pad(den));
        if den.coeffs[0].norm() <= 1e-300 {
            return Err(Error::PoleAt { re: center.re, im: center.im });
        }
        num.div(&den)
    }
}

/// Kœnigs data attached to an interior attracting fixed point.
#[derive(Debug, Clone)]
pub struct KoenigsData {
    pub z0: C64,
    /// `λ = −f′(z0)`.
    pub lambda: C64,
    /// `h` about `z0`, normalized by `h(z0) = 0`, `h′(z0) = 1`.
    pub koenigs: ScalarSeries,
    /// `h⁻¹` about `0`.
    pub koenigs_inv: ScalarSeries,
    /// Validity radius of `koenigs` in `|z − z0|`.
    pub koenigs_radius: f64,
    /// Validity radius of `koenigs_inv` in `|w|`.
    pub koenigs_inv_radius: f64,
}

/// Semigroup `{F_t}` generated by `f`, i.e. `∂_t F_t = f(F_t)`, `F_0 = id`.
#[derive(Debug, Clone)]
pub struct SemigroupModel {
    pub f: RationalMap,
    pub interior: Option<KoenigsData>,
    pub flow_tol: f64,
}

/// `0.8 / limsup |c_k|^{1/k}`, estimated from the upper half of the coefficients.
pub fn ratio_radius(s: &ScalarSeries) -> f64 {
    let n = s.order();
    if n == 0 {
        return f64::INFINITY;
    }
    let start = (n / 2).max(1);
    let root = (start..=n)
        .map(|k| s.coeffs[k].norm())
        .enumerate()
        .filter(|(_, c)| *c > 1e-300)
        .map(|(i, c)| c.powf(1.0 / (start + i) as f64))
        .fold(0.0, f64::max);
    if root <= 1e-12 {
        f64::INFINITY
    } else {
        RADIUS_SAFETY / root
    }
}

fn series_tail(s: &ScalarSeries, x_abs: f64) -> f64 {
    let n = s.order();
    let last = s.coeffs[n].norm() * x_abs.powi(n as i32);
    let prev = if n >= 1 { s.coeffs[n - 1].norm() * x_abs.powi(n as i32 - 1) } else { 0.0 };
    4.0 * last.max(prev * 0.8)
}

impl SemigroupModel {
    /// Builds the model around the interior fixed point found by Newton
    /// iteration from `hint` (default 0).
    pub fn build(f: RationalMap, hint: Option<C64>, order: usize) -> Result<Self> {
        let z0 = newton_fixed_point(&f, hint.unwrap_or(C64::new(0.0, 0.0)))?;
        let lambda = -f.derivative(z0)?;
        if lambda.norm() <= 1e-12 {
            return Err(Error::ZeroRate(lambda.norm()));
        }
        let fs = f.taylor(z0, order + 1)?;
        let koenigs = koenigs_series(&fs, lambda, order);
        let koenigs_inv = revert(&koenigs)?;
        let koenigs_radius = ratio_radius(&koenigs).min(1.0 - z0.norm());
        let koenigs_inv_radius = ratio_radius(&koenigs_inv);
        Ok(Self {
            f,
            interior: Some(KoenigsData { z0, lambda, koenigs, koenigs_inv, koenigs_radius, koenigs_inv_radius }),
            flow_tol: DEFAULT_FLOW_TOL,
        })
    }

    /// Model without an interior fixed point; flows use the ODE path only.
    pub fn without_fixed_point(f: RationalMap) -> Self {
        Self { f, interior: None, flow_tol: DEFAULT_FLOW_TOL }
    }

    /// [`SemigroupModel::build`], falling back to a boundary model when no
    /// interior fixed point exists.
    pub fn auto(f: RationalMap, hint: Option<C64>, order: usize) -> Result<Self> {
        match Self::build(f.clone(), hint, order) {
            Ok(m) => Ok(m),
            Err(Error::NoInteriorFixedPoint) => Ok(Self::without_fixed_point(f)),
            Err(e) => Err(e),
        }
    }

    pub fn linear(lambda: C64) -> Self {
        Self::build(RationalMap::polynomial(vec![C64::new(0.0, 0.0), -lambda]), None, DEFAULT_ORDER)
            .expect("linear generator always has the fixed point 0")
    }

    pub fn z0(&self) -> Option<C64> {
        self.interior.as_ref().map(|k| k.z0)
    }

    pub fn lambda(&self) -> Option<C64> {
        self.interior.as_ref().map(|k| k.lambda)
    }

    pub fn koenigs_data(&self) -> Result<&KoenigsData> {
        self.interior.as_ref().ok_or(Error::NoFixedPointModel)
    }

    /// `h(z)` from the truncated series, refusing points outside its radius.
    pub fn koenigs_eval(&self, z: C64) -> Result<C64> {
        let k = self.koenigs_data()?;
        k.koenigs.evaluate_guarded(z, k.koenigs_radius)
    }

    /// `h⁻¹(w)` from the truncated series.
    pub fn koenigs_inv_eval(&self, w: C64) -> Result<C64> {
        let k = self.koenigs_data()?;
        k.koenigs_inv.evaluate_guarded(w, k.koenigs_inv_radius)
    }

    /// `F_t(z)`: Kœnigs model where the series are accurate, ODE otherwise.
    pub fn flow(&self, t: f64, z: C64) -> Result<C64> {
        if z.norm() >= 1.0 {
            return Err(Error::OutOfDomain { re: z.re, im: z.im });
        }
        if t < 0.0 {
            return Err(Error::InvalidInput("negative time".into()));
        }
        if t == 0.0 {
            return Ok(z);
        }
        if let Some(w) = self.flow_series(t, z) {
            return Ok(w);
        }
        flow_ode(&self.f, t, z, self.flow_tol)
    }

    /// Series path of [`SemigroupModel::flow`]; `None` where its tail is too large.
    pub fn flow_series(&self, t: f64, z: C64) -> Option<C64> {
        let k = self.interior.as_ref()?;
        let x = (z - k.z0).norm();
        if x > k.koenigs_radius || series_tail(&k.koenigs, x) > SERIES_TAIL_TOL {
            return None;
        }
        let w = k.koenigs.evaluate(z) * (-k.lambda * t).exp();
        if w.norm() > k.koenigs_inv_radius || series_tail(&k.koenigs_inv, w.norm()) > SERIES_TAIL_TOL {
            return None;
        }
        Some(k.koenigs_inv.evaluate(w))
    }
}

fn newton_fixed_point(f: &RationalMap, start: C64) -> Result<C64> {
    let mut z = start;
    for _ in 0..200 {
        let fz = f.eval(z).map_err(|_| Error::NoInteriorFixedPoint)?;
        let dz = f.derivative(z).map_err(|_| Error::NoInteriorFixedPoint)?;
        if dz.norm() == 0.0 {
            break;
        }
        let step = fz / dz;
        z -= step;
        if !z.re.is_finite() || !z.im.is_finite() {
            break;
        }
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    let residual = f.eval(z).map(|v| v.norm()).unwrap_or(f64::INFINITY);
    if !(residual <= 1e-12) || z.norm() >= 1.0 - BOUNDARY_MARGIN {
        return Err(Error::NoInteriorFixedPoint);
    }
    Ok(z)
}

/// Schröder recursion for `h′ f = −λ h`, `h_1 = 1`:
/// `λ (k − 1) h_k = Σ_{j=1}^{k−1} j h_j f_{k+1−j}`.
fn koenigs_series(fs: &ScalarSeries, lambda: C64, order: usize) -> ScalarSeries {
    let zero = C64::new(0.0, 0.0);
    let mut h = vec![zero; order + 1];
    if order >= 1 {
        h[1] = C64::new(1.0, 0.0);
    }
    for k in 2..=order {
        let s: C64 = (1..k).map(|j| h[j] * j as f64 * fs.coeffs[k + 1 - j]).sum();
        h[k] = s / (lambda * (k - 1) as f64);
    }
    Series::new(fs.center, h)
}

/// `F_t(z)` by integrating `u′ = f(u)`, `u(0) = z`.
pub fn flow_ode(f: &RationalMap, t: f64, z: C64, tol: f64) -> Result<C64> {
    if z.norm() >= 1.0 {
        return Err(Error::OutOfDomain { re: z.re, im: z.im });
    }
    let (y, _) = integrate(
        |_, y, dy| {
            dy[0] = f.eval(y[0])?;
            Ok(())
        },
        &[z],
        t,
        OdeOptions::with_tol(tol),
        |t, y| if y[0].norm() >= 1.0 { Err(Error::DomainEscape { t }) } else { Ok(()) },
    )?;
    Ok(y[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn quadratic() -> RationalMap {
        RationalMap::real(&[0.0, -1.0, 1.0], &[1.0]).unwrap()
    }

    #[test]
    fn linear_model_has_identity_koenigs() {
        let m = SemigroupModel::build(RationalMap::real(&[0.0, -1.0], &[1.0]).unwrap(), None, 24).unwrap();
        let k = m.koenigs_data().unwrap();
        assert_eq!(k.z0, c(0.0));
        assert_eq!(k.lambda, c(1.0));
        assert_eq!(k.koenigs.coeffs[1], c(1.0));
        assert!(k.koenigs.coeffs[2..].iter().all(|x| x.norm() == 0.0));
        let m2 = SemigroupModel::linear(c(2.0));
        assert_eq!(m2.lambda(), Some(c(2.0)));
        assert!(m2.koenigs_data().unwrap().koenigs.coeffs[2..].iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn quadratic_koenigs_is_geometric() {
        // f = z² − z ⇒ h(z) = z/(1 − z)
        let m = SemigroupModel::build(quadratic(), None, 24).unwrap();
        let k = m.koenigs_data().unwrap();
        assert_eq!(k.lambda, c(1.0));
        for (i, h) in k.koenigs.coeffs.iter().enumerate().skip(1) {
            assert!((h - c(1.0)).norm() < 1e-13, "h_{i} = {h}");
        }
        assert!((k.koenigs_radius - 0.8).abs() < 1e-12);
    }

    #[test]
    fn flow_examples() {
        let lin = SemigroupModel::linear(c(1.0));
        let z = C64::new(0.3, -0.4);
        assert!((lin.flow(0.7, z).unwrap() - z * (-0.7f64).exp()).norm() < 1e-15);
        assert_eq!(lin.flow(0.0, z).unwrap(), z);
        let quad = SemigroupModel::build(quadratic(), None, 24).unwrap();
        let w = quad.flow(2f64.ln(), c(0.5)).unwrap();
        assert!((w - c(1.0 / 3.0)).norm() < 1e-10, "{w}");
    }

    #[test]
    fn flow_ode_examples() {
        let f = RationalMap::real(&[0.0, -1.0], &[1.0]).unwrap();
        assert!((flow_ode(&f, 1.0, c(0.3), 1e-12).unwrap() - c(0.3 * (-1f64).exp())).norm() < 1e-12);
        assert_eq!(flow_ode(&f, 0.0, c(0.3), 1e-12).unwrap(), c(0.3));
        let affine = RationalMap::real(&[1.0, -1.0], &[1.0]).unwrap();
        let u = flow_ode(&affine, 1.0, c(0.0), 1e-12).unwrap();
        assert!((u - c(1.0 - (-1f64).exp())).norm() < 1e-11);
    }

    #[test]
    fn boundary_fixed_point_detected() {
        let affine = RationalMap::real(&[1.0, -1.0], &[1.0]).unwrap();
        assert!(matches!(SemigroupModel::build(affine.clone(), None, 24), Err(Error::NoInteriorFixedPoint)));
        let m = SemigroupModel::auto(affine, None, 24).unwrap();
        assert!(m.interior.is_none());
        assert!((m.flow(1.0, c(0.0)).unwrap() - c(1.0 - (-1f64).exp())).norm() < 1e-11);
    }

    #[test]
    fn escaping_vector_field_is_flagged() {
        // u' = 1 pushes every trajectory through the boundary.
        let f = RationalMap::real(&[1.0], &[1.0]).unwrap();
        assert!(matches!(flow_ode(&f, 5.0, c(0.0), 1e-10), Err(Error::DomainEscape { .. })));
    }

    #[test]
    fn rational_taylor_expansion() {
        // 1/(1 − z) about 0.5: Σ 2^{k+1} (z − 0.5)^k
        let r = RationalMap::real(&[1.0], &[1.0, -1.0]).unwrap();
        let s = r.taylor(c(0.5), 6).unwrap();
        for (k, v) in s.coeffs.iter().enumerate() {
            assert!((v - c(2f64.powi(k as i32 + 1))).norm() < 1e-10);
        }
    }
}
