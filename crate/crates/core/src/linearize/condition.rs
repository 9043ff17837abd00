use serde::{Deserialize, Serialize};

use crate::algebra::{ad_matrix, eigenvalues, operator_norm, shifted_operator, CMatrix, Svd, C64, RESONANCE_RTOL};
use crate::error::{Error, Result};

/// Default tolerance for `kλ` to count as a difference of eigenvalues,
/// relative to `1 + |kλ|`.
pub const DEFAULT_SPECTRAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub lambda: C64,
    pub spectrum_b0: Vec<C64>,
    /// All `μ_i − μ_j`, with multiplicity.
    pub difference_set: Vec<C64>,
    /// Orders `k` with `kλ` in the difference set.
    pub violated_k: Vec<usize>,
    /// Orders `k` where `kλ − ad_{B0}` is numerically singular.
    pub rank_violated_k: Vec<usize>,
    /// `ceil(‖ad_{B0}‖ / |λ|)`; no order above it can be resonant.
    pub k_bound: usize,
    pub rank_route_agrees: bool,
    /// True when no order is resonant.
    pub holds: bool,
}

/// `ceil(‖ad_{B0}‖ / |λ|)`.
pub fn resonance_bound(b0: &CMatrix, lambda: C64) -> usize {
    let ratio = operator_norm(&ad_matrix(b0)) / lambda.norm();
    (ratio * (1.0 + 1e-9)).ceil() as usize
}

/// Whether `kλ` is numerically an eigenvalue of `ad_{B0}`, by the scaled
/// smallest singular value of `kλ − ad_{B0}`.
pub fn rank_resonant(b0: &CMatrix, lambda: C64, k: usize, rtol: f64) -> Result<(bool, f64)> {
    let scale = (lambda * k as f64).norm() + operator_norm(&ad_matrix(b0));
    let smin = Svd::new(&shifted_operator(k, lambda, b0))?.smallest();
    Ok((smin <= rtol * scale, smin / scale))
}

/// Tests `kλ ∉ σ(B0) − σ(B0)` for `k = 1 … k_bound` through eigenvalue
/// differences and, independently, through the rank of `kλ − ad_{B0}`.
pub fn condition_check(b0: &CMatrix, lambda: C64, tol: f64) -> Result<ConditionReport> {
    if lambda.re <= 0.0 {
        return Err(Error::InvalidInput("Re lambda must be positive".into()));
    }
    let spectrum_b0 = eigenvalues(b0)?;
    let difference_set: Vec<C64> = spectrum_b0.iter().flat_map(|a| spectrum_b0.iter().map(move |b| a - b)).collect();
    let k_bound = resonance_bound(b0, lambda);
    let mut violated_k = Vec::new();
    let mut rank_violated_k = Vec::new();
    for k in 1..=k_bound {
        let target = lambda * k as f64;
        let gap = difference_set.iter().map(|d| (d - target).norm()).fold(f64::INFINITY, f64::min);
        if gap <= tol * (1.0 + target.norm()) {
            violated_k.push(k);
        }
        if rank_resonant(b0, lambda, k, RESONANCE_RTOL)?.0 {
            rank_violated_k.push(k);
        }
    }
    let rank_route_agrees = violated_k == rank_violated_k;
    let holds = violated_k.is_empty() && rank_violated_k.is_empty();
    Ok(ConditionReport {
        lambda,
        spectrum_b0,
        difference_set,
        violated_k,
        rank_violated_k,
        k_bound,
        rank_route_agrees,
        holds,
    })
}
