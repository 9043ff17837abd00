use crate::algebra::{ad_matrix, operator_norm, shifted_operator, CMatrix, Svd, C64, RESONANCE_RTOL};
use crate::cocycle::CocycleGenerator;
use crate::error::{Error, Result};

/// Unit-norm `A` outside the range of `kλ − ad_{B0}` (a left null vector, reshaped).
pub fn obstruction_direction(b0: &CMatrix, lambda: C64, k: usize) -> Result<CMatrix> {
    if k == 0 {
        return Err(Error::NotResonant { k });
    }
    let t = shifted_operator(k, lambda, b0);
    let scale = (lambda * k as f64).norm() + operator_norm(&ad_matrix(b0));
    // Left singular vectors of T are right singular vectors of T*.
    let svd = Svd::new(&t.adjoint())?;
    if svd.smallest() > RESONANCE_RTOL * scale {
        return Err(Error::NotResonant { k });
    }
    let last = svd.sigma.len() - 1;
    let a = CMatrix::unvectorize(b0.dim(), &svd.v.column(last))?;
    let norm = operator_norm(&a);
    Ok(a.scale_real(1.0 / norm))
}

/// `B(z) = B0 + z^k A` with `A` outside the range of `kλ − ad_{B0}`.
///
/// Over the linear semigroup `f(z) = −λz` the Kœnigs map is the identity, so
/// the conjugated series is exactly `b(w) = B0 + A w^k` and the coefficient
/// recursion is obstructed at order `k`.
pub fn sharpness_witness(b0: &CMatrix, lambda: C64, k: usize) -> Result<CocycleGenerator> {
    let a = obstruction_direction(b0, lambda, k)?;
    let n = b0.dim();
    let mut coeffs = vec![CMatrix::zeros(n); k + 1];
    coeffs[0] = b0.clone();
    coeffs[k] = a;
    CocycleGenerator::polynomial(coeffs)
}
