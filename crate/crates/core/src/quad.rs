//! Quadrature on intervals and Cauchy-integral derivatives of holomorphic maps.

use rayon::prelude::*;

use crate::algebra::{CMatrix, C64};
use crate::error::{Error, Result};

/// Nodes on the circle used for Cauchy-integral derivatives.
pub const CAUCHY_NODES: usize = 64;

/// Circle radius for derivatives at `z`: a tenth of the distance to the unit circle.
pub fn cauchy_radius(z: C64) -> f64 {
    0.1 * (1.0 - z.norm())
}

/// `g′(z)` by the trapezoid rule on `(1/2πi)∮ g(ζ)/(ζ − z)² dζ` over `|ζ − z| = rho`.
pub fn cauchy_derivative<G>(g: G, z: C64, rho: f64, nodes: usize) -> Result<CMatrix>
where
    G: Fn(C64) -> Result<CMatrix> + Sync,
{
    let values: Vec<(C64, CMatrix)> = (0..nodes)
        .into_par_iter()
        .map(|j| {
            let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / nodes as f64);
            g(z + w * rho).map(|v| (w, v))
        })
        .collect::<Result<_>>()?;
    let mut acc = CMatrix::zeros(values[0].1.dim());
    for (w, v) in &values {
        acc += &v.scale(w.conj());
    }
    Ok(acc.scale_real(1.0 / (nodes as f64 * rho)))
}

/// Scalar version of [`cauchy_derivative`].
pub fn cauchy_derivative_scalar<G>(g: G, z: C64, rho: f64, nodes: usize) -> Result<C64>
where
    G: Fn(C64) -> Result<C64> + Sync,
{
    let m = cauchy_derivative(|w| g(w).map(|v| CMatrix::scalar(1, v)), z, rho, nodes)?;
    Ok(m[(0, 0)])
}

/// Taylor coefficients `c_0 … c_order` of `g` about `center` from `nodes`
/// samples on the circle of radius `rho`.
pub fn cauchy_taylor<G>(g: G, center: C64, rho: f64, order: usize, nodes: usize) -> Result<Vec<CMatrix>>
where
    G: Fn(C64) -> Result<CMatrix> + Sync,
{
    let values: Vec<CMatrix> = (0..nodes)
        .into_par_iter()
        .map(|j| g(center + C64::from_polar(rho, 2.0 * std::f64::consts::PI * j as f64 / nodes as f64)))
        .collect::<Result<_>>()?;
    let n = values[0].dim();
    Ok((0..=order)
        .map(|k| {
            let mut acc = CMatrix::zeros(n);
            for (j, v) in values.iter().enumerate() {
                let phase = C64::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * k % nodes) as f64 / nodes as f64);
                acc += &v.scale(phase);
            }
            acc.scale_real(1.0 / (nodes as f64 * rho.powi(k as i32)))
        })
        .collect())
}

const SIMPSON_MAX_DEPTH: usize = 48;

/// Adaptive Simpson quadrature of a matrix-valued integrand on `[a, b]`,
/// absolute tolerance `tol` in the max-entry norm.
pub fn adaptive_simpson<G>(g: G, a: f64, b: f64, tol: f64) -> Result<CMatrix>
where
    G: Fn(f64) -> Result<CMatrix>,
{
    let fa = g(a)?;
    let fb = g(b)?;
    let m = 0.5 * (a + b);
    let fm = g(m)?;
    let whole = simpson(a, b, &fa, &fm, &fb);
    simpson_rec(&g, a, b, fa, fm, fb, whole, tol, SIMPSON_MAX_DEPTH)
}

fn simpson(a: f64, b: f64, fa: &CMatrix, fm: &CMatrix, fb: &CMatrix) -> CMatrix {
    (fa + &fm.scale_real(4.0) + fb.clone()).scale_real((b - a) / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<G>(
    g: &G,
    a: f64,
    b: f64,
    fa: CMatrix,
    fm: CMatrix,
    fb: CMatrix,
    whole: CMatrix,
    tol: f64,
    depth: usize,
) -> Result<CMatrix>
where
    G: Fn(f64) -> Result<CMatrix>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = g(lm)?;
    let frm = g(rm)?;
    let left = simpson(a, m, &fa, &flm, &fm);
    let right = simpson(m, b, &fm, &frm, &fb);
    let sum = &left + &right;
    let delta = &sum - &whole;
    if delta.max_abs() <= 15.0 * tol {
        return Ok(&sum + &delta.scale_real(1.0 / 15.0));
    }
    if depth == 0 {
        return Err(Error::NoConvergence { iterations: SIMPSON_MAX_DEPTH });
    }
    let l = simpson_rec(g, a, m, fa, flm, fm.clone(), left, 0.5 * tol, depth - 1)?;
    let r = simpson_rec(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(&l + &r)
}

/// Scalar version of [`adaptive_simpson`].
pub fn adaptive_simpson_scalar<G>(g: G, a: f64, b: f64, tol: f64) -> Result<C64>
where
    G: Fn(f64) -> Result<C64>,
{
    let m = adaptive_simpson(|t| g(t).map(|v| CMatrix::scalar(1, v)), a, b, tol)?;
    Ok(m[(0, 0)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_exponential() {
        let z = C64::new(0.2, 0.1);
        let d = cauchy_derivative_scalar(|w| Ok(w.exp()), z, cauchy_radius(z), CAUCHY_NODES).unwrap();
        assert!((d - z.exp()).norm() < 1e-13);
    }

    #[test]
    fn taylor_of_geometric_series() {
        let cs = cauchy_taylor(|w| Ok(CMatrix::scalar(1, 1.0 / (1.0 - w))), C64::new(0.0, 0.0), 0.5, 12, 128).unwrap();
        for c in cs {
            assert!((c[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn simpson_integrates_smooth_functions() {
        let v = adaptive_simpson_scalar(|t| Ok(C64::new(t.cos(), t * t)), 0.0, 2.0, 1e-12).unwrap();
        assert!((v - C64::new(2f64.sin(), 8.0 / 3.0)).norm() < 1e-11);
    }
}
