//! The commutator operator `ad_b(m) = m b − b m` and the shifted resolvent
//! solve `(kλ − ad_b) m = rhs` on the column-stacked system.

use serde::{Deserialize, Serialize};

use super::decomp::{operator_norm, Lu, Svd};
use super::matrix::{CMatrix, C64};
use crate::error::{Error, Result};

/// Scaled threshold below which `kλ − ad_{B0}` is treated as singular.
pub const RESONANCE_RTOL: f64 = 1e-8;

/// `n² × n²` matrix of `m ↦ m b0 − b0 m` under column stacking:
/// `b0ᵀ ⊗ I − I ⊗ b0`.
pub fn ad_matrix(b0: &CMatrix) -> CMatrix {
    let n = b0.dim();
    let mut out = CMatrix::zeros(n * n);
    for j in 0..n {
        for i in 0..n {
            let row = i + j * n;
            // (b0ᵀ ⊗ I): column (i, l) with weight b0[l][j]
            for l in 0..n {
                out[(row, i + l * n)] += b0[(l, j)];
            }
            // (I ⊗ b0): column (k, j) with weight b0[i][k]
            for k in 0..n {
                out[(row, k + j * n)] -= b0[(i, k)];
            }
        }
    }
    out
}

/// `kλ·1 − ad_matrix(b0)`.
pub fn shifted_operator(k: usize, lambda: C64, b0: &CMatrix) -> CMatrix {
    let ad = ad_matrix(b0);
    let shift = lambda * k as f64;
    let mut t = ad.scale_real(-1.0);
    for i in 0..t.dim() {
        t[(i, i)] += shift;
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SylvesterKind {
    Unique,
    ResonantSolvable,
    Obstructed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SylvesterOutcome {
    pub kind: SylvesterKind,
    pub solution: Option<CMatrix>,
    pub residual: f64,
    pub smallest_singular_value: f64,
    /// `smallest_singular_value / (|kλ| + ‖ad‖)`.
    pub scaled_singular_value: f64,
}

/// Solves `(kλ) m − ad_{b0}(m) = rhs`.
///
/// Nonsingular systems go through LU. Singular ones (scaled smallest singular
/// value ≤ [`RESONANCE_RTOL`]) get the minimum-norm least-squares solution,
/// which is accepted when its residual is ≤ `tol · max(1, ‖rhs‖)`.
pub fn sylvester_resolve(k: usize, lambda: C64, b0: &CMatrix, rhs: &CMatrix, tol: f64) -> Result<SylvesterOutcome> {
    sylvester_resolve_with(k, lambda, b0, rhs, tol, RESONANCE_RTOL)
}

pub fn sylvester_resolve_with(
    k: usize,
    lambda: C64,
    b0: &CMatrix,
    rhs: &CMatrix,
    tol: f64,
    resonance_rtol: f64,
) -> Result<SylvesterOutcome> {
    if k == 0 {
        return Err(Error::InvalidInput("order k must be positive".into()));
    }
    if lambda.re <= 0.0 {
        return Err(Error::InvalidInput("Re lambda must be positive".into()));
    }
    let n = b0.dim();
    if rhs.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: rhs.dim() });
    }
    let t = shifted_operator(k, lambda, b0);
    let scale = (lambda * k as f64).norm() + operator_norm(&ad_matrix(b0));
    let svd = Svd::new(&t)?;
    let smin = svd.smallest();
    let threshold = resonance_rtol * scale;
    let b = rhs.vectorize();
    let rhs_scale = rhs.frobenius_norm().max(1.0);
    let residual_of = |x: &[C64]| -> f64 {
        let tx = t.mul_vec(x);
        tx.iter().zip(&b).map(|(a, c)| (a - c).norm_sqr()).sum::<f64>().sqrt()
    };

    if smin > threshold {
        let x = match Lu::new(&t) {
            Ok(lu) => lu.solve(&b),
            Err(_) => svd.pseudo_solve(&b, 0.0),
        };
        let residual = residual_of(&x);
        return Ok(SylvesterOutcome {
            kind: SylvesterKind::Unique,
            solution: Some(CMatrix::unvectorize(n, &x)?),
            residual,
            smallest_singular_value: smin,
            scaled_singular_value: smin / scale,
        });
    }

    let x = svd.pseudo_solve(&b, threshold);
    let residual = residual_of(&x);
    if residual <= tol * rhs_scale {
        Ok(SylvesterOutcome {
            kind: SylvesterKind::ResonantSolvable,
            solution: Some(CMatrix::unvectorize(n, &x)?),
            residual,
            smallest_singular_value: smin,
            scaled_singular_value: smin / scale,
        })
    } else {
        Ok(SylvesterOutcome {
            kind: SylvesterKind::Obstructed,
            solution: None,
            residual,
            smallest_singular_value: smin,
            scaled_singular_value: smin / scale,
        })
    }
}
