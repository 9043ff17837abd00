//! Factorizations: LU with partial pivoting, one-sided Jacobi SVD and
//! Hermitian Jacobi eigenvalues.

use super::matrix::{CMatrix, C64};
use crate::error::{Error, Result};

/// Relative pivot / singular value threshold.
pub const SINGULAR_RTOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);

/// LU factorization `P a = L U` with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &CMatrix) -> Result<Self> {
        let n = a.dim();
        let scale = a.max_abs();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) =
                (k..n).map(|i| (i, lu[(i, k)].norm())).fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pivot <= SINGULAR_RTOL * scale || pivot == 0.0 {
                return Err(Error::SingularMatrix { pivot });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            let inv = 1.0 / lu[(k, k)];
            for i in k + 1..n {
                let l = lu[(i, k)] * inv;
                lu[(i, k)] = l;
                if l != ZERO {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= l * u;
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.dim();
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    /// Solves `a X = b` column by column.
    pub fn solve_matrix(&self, b: &CMatrix) -> CMatrix {
        let n = b.dim();
        let mut out = CMatrix::zeros(n);
        for j in 0..n {
            let col = self.solve(&b.column(j));
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        out
    }
}

/// Matrix inverse via LU with partial pivoting.
pub fn mat_inv(a: &CMatrix) -> Result<CMatrix> {
    let lu = Lu::new(a)?;
    Ok(lu.solve_matrix(&CMatrix::identity(a.dim())))
}

/// Singular value decomposition `a = U Σ V*`.
///
/// Columns of `u` belonging to zero singular values are left as zero vectors;
/// use the decomposition of `a*` when left null vectors are needed.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    /// One-sided (Hestenes) Jacobi SVD.
    pub fn new(a: &CMatrix) -> Result<Self> {
        let n = a.dim();
        // Work on columns: cols[j] is column j of the rotated matrix.
        let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
        let mut vcols: Vec<Vec<C64>> =
            (0..n).map(|j| (0..n).map(|i| if i == j { C64::new(1.0, 0.0) } else { ZERO }).collect()).collect();
        let eps = 1e-15;
        let max_sweeps = 60;
        let mut converged = n == 1;
        for _ in 0..max_sweeps {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let alpha: f64 = cols[p].iter().map(|x| x.norm_sqr()).sum();
                    let beta: f64 = cols[q].iter().map(|x| x.norm_sqr()).sum();
                    let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                    let g = gamma.norm();
                    if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let phase = gamma / g;
                    let zeta = (beta - alpha) / (2.0 * g);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    let pc = phase.conj();
                    rotate_columns(&mut cols, p, q, c, s, pc);
                    rotate_columns(&mut vcols, p, q, c, s, pc);
                }
            }
            if !rotated {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { iterations: max_sweeps });
        }
        let mut sigma: Vec<f64> = cols.iter().map(|c| c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()).collect();
        // Sort descending.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap_or(std::cmp::Ordering::Equal));
        let mut u = CMatrix::zeros(n);
        let mut v = CMatrix::zeros(n);
        for (dst, &src) in order.iter().enumerate() {
            let s = sigma[src];
            for i in 0..n {
                u[(i, dst)] = if s > 0.0 { cols[src][i] / s } else { ZERO };
                v[(i, dst)] = vcols[src][i];
            }
        }
        sigma = order.iter().map(|&i| sigma[i]).collect();
        Ok(Self { u, sigma, v })
    }

    pub fn smallest(&self) -> f64 {
        *self.sigma.last().unwrap()
    }

    pub fn largest(&self) -> f64 {
        self.sigma[0]
    }

    /// Minimum-norm least-squares solution of `a x = b`, discarding singular
    /// values at or below `threshold`.
    pub fn pseudo_solve(&self, b: &[C64], threshold: f64) -> Vec<C64> {
        let n = self.sigma.len();
        let mut x = vec![ZERO; n];
        for (k, &s) in self.sigma.iter().enumerate() {
            if s <= threshold {
                continue;
            }
            let coef: C64 = (0..n).map(|i| self.u[(i, k)].conj() * b[i]).sum::<C64>() / s;
            for i in 0..n {
                x[i] += self.v[(i, k)] * coef;
            }
        }
        x
    }
}

fn rotate_columns(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, s: f64, phase: C64) {
    let (left, right) = cols.split_at_mut(q);
    let colp = &mut left[p];
    let colq = &mut right[0];
    for (up, uq) in colp.iter_mut().zip(colq.iter_mut()) {
        let a = *up;
        let b = *uq * phase;
        *up = a * c - b * s;
        *uq = a * s + b * c;
    }
}

pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    Ok(Svd::new(a)?.sigma)
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    let n = a.dim();
    let mut m = a.hermitian_part();
    let scale = m.frobenius_norm();
    let max_sweeps = 60;
    let mut converged = false;
    for _ in 0..max_sweeps {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                // Make the (p, q) entry real by a diagonal phase on index q.
                let phase = apq / g;
                for k in 0..n {
                    m[(k, q)] *= phase.conj();
                }
                for k in 0..n {
                    m[(q, k)] *= phase;
                }
                let alpha = m[(p, p)].re;
                let beta = m[(q, q)].re;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 { 1.0 } else { zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt()) };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * c - mkq * s;
                    m[(k, q)] = mkp * s + mkq * c;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = mpk * c - mqk * s;
                    m[(q, k)] = mpk * s + mqk * c;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { iterations: max_sweeps });
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(eig)
}

/// Spectral norm (largest singular value).
pub fn operator_norm(a: &CMatrix) -> f64 {
    if a.max_abs() == 0.0 {
        return 0.0;
    }
    if a.dim() == 1 {
        return a[(0, 0)].norm();
    }
    match Svd::new(a) {
        Ok(svd) => svd.largest(),
        Err(_) => power_norm(a),
    }
}

/// Power iteration on `a* a`, used when Jacobi sweeps do not converge.
fn power_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let gram = &a.adjoint() * a;
    let mut v: Vec<C64> = (0..n).map(|i| C64::new(1.0 + 0.37 * i as f64, 0.11 * (i as f64 + 1.0).sqrt())).collect();
    let mut estimate = 0.0;
    for _ in 0..20_000 {
        let w = gram.mul_vec(&v);
        let rayleigh: f64 =
            v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum::<f64>() / v.iter().map(|x| x.norm_sqr()).sum::<f64>();
        let wn = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if wn == 0.0 {
            break;
        }
        v = w.into_iter().map(|x| x / wn).collect();
        let done = (rayleigh - estimate).abs() <= 1e-15 * rayleigh.abs();
        estimate = rayleigh;
        if done {
            break;
        }
    }
    estimate.max(0.0).sqrt()
}

/// Logarithmic norm for the spectral norm: the largest eigenvalue of the
/// Hermitian part.
pub fn log_norm(a: &CMatrix) -> Result<f64> {
    let eig = hermitian_eigenvalues(&a.hermitian_part())?;
    Ok(*eig.last().unwrap())
}
