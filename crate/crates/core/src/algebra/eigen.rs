//! General complex eigenvalues: Householder reduction to upper Hessenberg
//! form followed by single-shift QR iteration with Wilkinson shifts.

use super::matrix::{CMatrix, C64};
use crate::error::{Error, Result};

/// Default dimension cap for the eigensolver.
pub const DEFAULT_MAX_DIM: usize = 32;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Reduces `a` to upper Hessenberg form by unitary similarity.
pub fn hessenberg(a: &CMatrix) -> CMatrix {
    let n = a.dim();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|c| *c /= vnorm);
        // H <- (I - 2 v v*) H
        for j in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * h[(k + 1 + i, j)]).sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= *vi * dot * 2.0;
            }
        }
        // H <- H (I - 2 v v*)
        for i in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(j, vj)| h[(i, k + 1 + j)] * vj).sum();
            for (j, vj) in v.iter().enumerate() {
                h[(i, k + 1 + j)] -= dot * vj.conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    h
}

fn givens(x: C64, y: C64) -> (f64, C64) {
    let xn = x.norm();
    if y == ZERO {
        return (1.0, ZERO);
    }
    if xn == 0.0 {
        return (0.0, C64::new(1.0, 0.0));
    }
    let r = xn.hypot(y.norm());
    (xn / r, (x / xn) * y.conj() / r)
}

/// Eigenvalues with multiplicity, using the default dimension cap.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<C64>> {
    eigenvalues_capped(a, DEFAULT_MAX_DIM)
}

pub fn eigenvalues_capped(a: &CMatrix, max_dim: usize) -> Result<Vec<C64>> {
    let n = a.dim();
    if n > max_dim {
        return Err(Error::DimensionTooLarge { dim: n, max: max_dim });
    }
    if !a.is_finite() {
        return Err(Error::InvalidInput("non-finite matrix entries".into()));
    }
    let mut h = hessenberg(a);
    let mut eig = vec![ZERO; n];
    let eps = f64::EPSILON;
    let max_iter = 60 * n.max(1);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        // Locate the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let reference = if diag == 0.0 { 1.0 } else { diag };
            if sub <= eps * reference {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter {
            return Err(Error::NoConvergence { iterations: total });
        }
        let shift = if iter.is_multiple_of(11) {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + C64::new(h[(hi, hi - 1)].norm() * 0.75, h[(hi, hi - 1)].norm() * 0.25)
        } else {
            let a11 = h[(hi - 1, hi - 1)];
            let a12 = h[(hi - 1, hi)];
            let a21 = h[(hi, hi - 1)];
            let a22 = h[(hi, hi)];
            let half_tr = (a11 + a22) * 0.5;
            let disc = ((a11 - a22) * 0.5 * ((a11 - a22) * 0.5) + a12 * a21).sqrt();
            let l1 = half_tr + disc;
            let l2 = half_tr - disc;
            if (l1 - a22).norm() <= (l2 - a22).norm() {
                l1
            } else {
                l2
            }
        };
        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = -s.conj() * a + b * c;
            }
            rotations.push((c, s));
        }
        for (idx, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + idx;
            let top = (k + 2).min(hi);
            for i in lo..=top {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s.conj();
                h[(i, k + 1)] = -a * s + b * c;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }
    Ok(eig)
}
