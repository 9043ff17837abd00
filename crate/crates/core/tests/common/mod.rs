#![allow(dead_code)]

use cocycle_lab::cocycle::CocycleGenerator;
use cocycle_lab::dynamics::{RationalMap, SemigroupModel};
use cocycle_lab::{CMatrix, C64};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut impl Rng, scale: f64) -> C64 {
    C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

pub fn random_matrix(rng: &mut impl Rng, n: usize, scale: f64) -> CMatrix {
    CMatrix::from_row_major(n, (0..n * n).map(|_| random_complex(rng, scale)).collect()).unwrap()
}

/// Random matrix with a bounded condition number: `I + small perturbation` times a scale.
pub fn random_invertible(rng: &mut impl Rng, n: usize) -> CMatrix {
    let p = random_matrix(rng, n, 0.3 / n as f64);
    &CMatrix::identity(n) + &p
}

pub fn to_na(a: &CMatrix) -> DMatrix<C64> {
    let n = a.dim();
    DMatrix::from_fn(n, n, |i, j| a[(i, j)])
}

pub fn from_na(a: &DMatrix<C64>) -> CMatrix {
    let n = a.nrows();
    CMatrix::from_row_major(n, (0..n * n).map(|k| a[(k / n, k % n)]).collect()).unwrap()
}

/// Eigenvalues from nalgebra's complex Schur form.
pub fn na_eigenvalues(a: &CMatrix) -> Vec<C64> {
    let (_, t) = nalgebra::Schur::new(to_na(a)).unpack();
    (0..a.dim()).map(|i| t[(i, i)]).collect()
}

/// Greedy matching distance between two multisets of complex numbers.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

pub fn unit_disk_point(rng: &mut impl Rng, r_max: f64) -> C64 {
    let r = r_max * rng.gen_range(0.0f64..1.0).sqrt();
    C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// `P diag(d) P⁻¹` with a well-conditioned random `P`.
pub fn with_spectrum(rng: &mut impl Rng, d: &[C64]) -> CMatrix {
    let n = d.len();
    let p = random_invertible(rng, n);
    let p_inv = cocycle_lab::algebra::mat_inv(&p).unwrap();
    &(&p * &CMatrix::from_diag(d)) * &p_inv
}

pub fn poly_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![c(0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `f(z) = −(z − τ)(1 − τ̄ z) p(z)` with `Re p > 0` on the closed disk.
pub fn random_semigroup_map(rng: &mut impl Rng, tau: C64) -> RationalMap {
    let b = random_complex(rng, 0.3);
    let d = random_complex(rng, 0.2);
    let a = C64::new(b.norm() + d.norm() + rng.gen_range(0.3..1.5), rng.gen_range(-1.0..1.0));
    let factor = poly_mul(&[-tau, c(1.0)], &[c(1.0), -tau.conj()]);
    let f = poly_mul(&factor, &[a, b, d]).into_iter().map(|x| -x).collect();
    RationalMap::polynomial(f)
}

/// Polynomial generator with `degree + 1` random coefficients of size `scale`.
pub fn random_polynomial_generator(rng: &mut impl Rng, n: usize, degree: usize, scale: f64) -> CocycleGenerator {
    CocycleGenerator::polynomial((0..=degree).map(|_| random_matrix(rng, n, scale)).collect()).unwrap()
}

/// Smallest `|μ_i − μ_j − kλ|` over `k = 1 … k_max`.
pub fn resonance_gap(spectrum: &[C64], lambda: C64, k_max: usize) -> f64 {
    let mut gap = f64::INFINITY;
    for a in spectrum {
        for b in spectrum {
            for k in 1..=k_max {
                gap = gap.min((a - b - lambda * k as f64).norm());
            }
        }
    }
    gap
}

/// Interior model and polynomial generator of degree ≤ 2 whose value at the
/// fixed point has eigenvalue differences at least `0.1` away from `λℕ`.
pub fn random_linearizable_case(rng: &mut impl Rng, n: usize) -> (SemigroupModel, CocycleGenerator) {
    loop {
        let tau = unit_disk_point(rng, 0.3);
        let model = SemigroupModel::build(random_semigroup_map(rng, tau), Some(tau), 24).unwrap();
        let lambda = model.lambda().unwrap();
        let d: Vec<C64> = (0..n).map(|_| random_complex(rng, 0.4)).collect();
        if resonance_gap(&d, lambda, 64) < 0.1 {
            continue;
        }
        let b0 = with_spectrum(rng, &d);
        let b1 = random_matrix(rng, n, 0.4);
        let b2 = random_matrix(rng, n, 0.3);
        // B(z) = B0 + (z − τ) B1 + (z − τ)² B2 in powers of z.
        let c0 = &(&b0 - &b1.scale(tau)) + &b2.scale(tau * tau);
        let c1 = &b1 - &b2.scale(tau * 2.0);
        return (model, CocycleGenerator::polynomial(vec![c0, c1, b2]).unwrap());
    }
}
