//! Linearization `Γ_t(z) = M(F_t z)⁻¹ e^{t B0} M(z)` by power series in the
//! Kœnigs coordinate, plus closed-form quadratures for the scalar case.

mod commutative;
mod condition;
mod pipeline;
mod sharpness;

pub use commutative::{commutative_linearize_interior, commutative_linearize_nofix};
pub use condition::{condition_check, rank_resonant, resonance_bound, ConditionReport, DEFAULT_SPECTRAL_TOL};
pub use pipeline::{
    conjugated_generator, guarded_samples, linearize, linearized_gamma, reconstruct_error, Diagnostics,
    LinearizationOutcome, LinearizationStatus, LinearizeOptions, NEAR_RESONANT_RTOL, R_CAP,
};
pub use sharpness::{obstruction_direction, sharpness_witness};
