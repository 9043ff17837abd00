//! Dense complex matrix algebra `M_n(ℂ)` with the spectral norm.

mod decomp;
mod eigen;
mod expm;
mod matrix;
mod sylvester;

pub use decomp::{hermitian_eigenvalues, log_norm, mat_inv, operator_norm, singular_values, Lu, Svd, SINGULAR_RTOL};
pub use eigen::{eigenvalues, eigenvalues_capped, hessenberg, DEFAULT_MAX_DIM};
pub use expm::mat_exp;
pub use matrix::{CMatrix, C64};
pub use sylvester::{
    ad_matrix, shifted_operator, sylvester_resolve, sylvester_resolve_with, SylvesterKind, SylvesterOutcome,
    RESONANCE_RTOL,
};

/// Smallest singular value; zero-safe wrapper around the Jacobi SVD.
pub fn smallest_singular_value(a: &CMatrix) -> crate::Result<f64> {
    Ok(Svd::new(a)?.smallest())
}
