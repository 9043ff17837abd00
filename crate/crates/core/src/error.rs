use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular to working precision (pivot {pivot:e})")]
    SingularMatrix { pivot: f64 },

    #[error("iteration did not converge after {iterations} steps")]
    NoConvergence { iterations: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} exceeds the configured maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("series centers do not match")]
    CenterMismatch,

    #[error("series is not invertible: linear coefficient {linear:e}")]
    NotInvertible { linear: f64 },

    #[error("series exponential needs a zero constant term")]
    NonzeroConstantTerm,

    #[error("no interior fixed point found")]
    NoInteriorFixedPoint,

    #[error("rate at the fixed point vanishes: |lambda| = {0:e}")]
    ZeroRate(f64),

    #[error("point {re}+{im}i lies outside the unit disk")]
    OutOfDomain { re: f64, im: f64 },

    #[error("trajectory left the unit disk at t = {t}")]
    DomainEscape { t: f64 },

    #[error("ODE step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("sample point is a fixed point of the semigroup")]
    SamplePointIsFixedPoint,

    #[error("time integral V(t0, z) is not invertible for t0 = {t0}")]
    VNotInvertible { t0: f64 },

    #[error("disk of radius {radius} is not forward invariant")]
    NotInvariant { radius: f64 },

    #[error("sample lies outside the series convergence region (|w| = {w_abs}, limit {limit})")]
    OutsideConvergenceRegion { w_abs: f64, limit: f64 },

    #[error("improper integral tail does not converge")]
    TailNotConverging,

    #[error("generator vanishes on the integration path")]
    PoleOnPath,

    #[error("order {k} is not resonant for the given B0 and lambda")]
    NotResonant { k: usize },

    #[error("denominator vanishes at z = {re}+{im}i")]
    PoleAt { re: f64, im: f64 },

    #[error("interior fixed point required")]
    NoFixedPointModel,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
