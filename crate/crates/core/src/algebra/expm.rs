//! Matrix exponential by scaling and squaring with a degree-13 Padé kernel.

use super::decomp::Lu;
use super::matrix::{CMatrix, C64};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

/// `e^a`. Total for finite input.
pub fn mat_exp(a: &CMatrix) -> CMatrix {
    let n = a.dim();
    if n == 1 {
        return CMatrix::from_diag(&[a[(0, 0)].exp()]);
    }
    let norm = a.norm_1();
    if norm == 0.0 {
        return CMatrix::identity(n);
    }
    let squarings = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.scale_real(0.5f64.powi(squarings));
    let b = &PADE13;
    let ident = CMatrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let lin = |c6: f64, c4: f64, c2: f64, c0: f64| {
        let mut m = a6.scale_real(c6);
        m += &a4.scale_real(c4);
        m += &a2.scale_real(c2);
        m += &ident.scale_real(c0);
        m
    };
    let u_inner = &a6 * &lin(b[13], b[11], b[9], 0.0);
    let u = &a * &(&u_inner + &lin(b[7], b[5], b[3], b[1]));
    let v_inner = &a6 * &lin(b[12], b[10], b[8], 0.0);
    let v = &v_inner + &lin(b[6], b[4], b[2], b[0]);
    let p = &v + &u;
    let q = &v - &u;
    // q is well conditioned for ‖a‖₁ ≤ θ₁₃.
    let mut r = match Lu::new(&q) {
        Ok(lu) => lu.solve_matrix(&p),
        Err(_) => taylor_fallback(&a),
    };
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

fn taylor_fallback(a: &CMatrix) -> CMatrix {
    let n = a.dim();
    let mut term = CMatrix::identity(n);
    let mut sum = term.clone();
    for k in 1..40 {
        term = (&term * a).scale(C64::new(1.0 / k as f64, 0.0));
        sum += &term;
    }
    sum
}
