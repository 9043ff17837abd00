use std::fmt;
use std::sync::Arc;

use super::generator::Generator;
use crate::algebra::{CMatrix, C64};
use crate::dynamics::SemigroupModel;
use crate::error::{Error, Result};
use crate::ode::{integrate, OdeOptions};

/// Default local error tolerance for the coupled evolution system.
pub const DEFAULT_EVOLVE_TOL: f64 = 1e-12;

/// Anything that produces `Γ_t(z)`.
pub trait CocycleSource: Sync {
    fn dim(&self) -> usize;
    fn gamma(&self, t: f64, z: C64) -> Result<CMatrix>;
}

type GammaFn = dyn Fn(f64, C64) -> Result<CMatrix> + Send + Sync;

/// Closed-form semicocycle.
#[derive(Clone)]
pub struct CocycleOracle {
    pub label: String,
    dim: usize,
    eval: Arc<GammaFn>,
}

impl CocycleOracle {
    pub fn new<F>(label: impl Into<String>, dim: usize, eval: F) -> Self
    where
        F: Fn(f64, C64) -> Result<CMatrix> + Send + Sync + 'static,
    {
        Self { label: label.into(), dim, eval: Arc::new(eval) }
    }

    /// `Γ_t ≡ I`.
    pub fn trivial(dim: usize) -> Self {
        Self::new("trivial", dim, move |_, _| Ok(CMatrix::identity(dim)))
    }
}

impl fmt::Debug for CocycleOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CocycleOracle").field("label", &self.label).field("dim", &self.dim).finish()
    }
}

impl CocycleSource for CocycleOracle {
    fn dim(&self) -> usize {
        self.dim
    }

    fn gamma(&self, t: f64, z: C64) -> Result<CMatrix> {
        (self.eval)(t, z)
    }
}

/// Semicocycle obtained by solving the evolution problem.
pub struct Evolved<'a> {
    pub model: &'a SemigroupModel,
    pub generator: &'a dyn Generator,
    pub tol: f64,
}

impl<'a> Evolved<'a> {
    pub fn new(model: &'a SemigroupModel, generator: &'a dyn Generator) -> Self {
        Self { model, generator, tol: DEFAULT_EVOLVE_TOL }
    }
}

impl CocycleSource for Evolved<'_> {
    fn dim(&self) -> usize {
        self.generator.dim()
    }

    fn gamma(&self, t: f64, z: C64) -> Result<CMatrix> {
        evolve(self.model, self.generator, t, z, self.tol)
    }
}

/// `Γ_t(z)` from `u′ = f(u)`, `Γ′ = B(u) Γ`, `u(0) = z`, `Γ(0) = I`.
pub fn evolve(model: &SemigroupModel, b: &dyn Generator, t: f64, z: C64, tol: f64) -> Result<CMatrix> {
    Ok(evolve_path(model, b, &[t], z, tol)?.pop().expect("one time requested"))
}

/// `Γ_t(z)` at each of the nondecreasing times `ts`, from a single trajectory.
pub fn evolve_path(model: &SemigroupModel, b: &dyn Generator, ts: &[f64], z: C64, tol: f64) -> Result<Vec<CMatrix>> {
    if z.norm() >= 1.0 {
        return Err(Error::OutOfDomain { re: z.re, im: z.im });
    }
    if ts.iter().any(|&t| t < 0.0 || !t.is_finite()) {
        return Err(Error::InvalidInput("times must be finite and nonnegative".into()));
    }
    if ts.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("times must be nondecreasing".into()));
    }
    let n = b.dim();
    let mut state = vec![C64::new(0.0, 0.0); 1 + n * n];
    state[0] = z;
    for i in 0..n {
        state[1 + i * n + i] = C64::new(1.0, 0.0);
    }
    let mut out = Vec::with_capacity(ts.len());
    let mut now = 0.0;
    for &t in ts {
        let offset = now;
        let (next, _) = integrate(
            |_, y, dy| {
                dy[0] = model.f.eval(y[0])?;
                let bu = b.eval(y[0])?;
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = C64::new(0.0, 0.0);
                        for k in 0..n {
                            acc += bu[(i, k)] * y[1 + k * n + j];
                        }
                        dy[1 + i * n + j] = acc;
                    }
                }
                Ok(())
            },
            &state,
            t - now,
            OdeOptions::with_tol(tol),
            |s, y| {
                if y[0].norm() >= 1.0 {
                    Err(Error::DomainEscape { t: offset + s })
                } else {
                    Ok(())
                }
            },
        )?;
        state = next;
        now = t;
        out.push(CMatrix::from_row_major(n, state[1..].to_vec())?);
    }
    Ok(out)
}
