use crate::algebra::C64;
use crate::cocycle::Generator;
use crate::dynamics::{RationalMap, SemigroupModel};
use crate::error::{Error, Result};
use crate::ode::{integrate, OdeOptions};
use crate::quad::adaptive_simpson_scalar;

const SCHWARZ_NODES: usize = 64;

fn scalar_eval(b: &dyn Generator, z: C64) -> Result<C64> {
    Ok(b.eval(z)?[(0, 0)])
}

fn require_scalar(b: &dyn Generator) -> Result<()> {
    if b.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: b.dim() });
    }
    Ok(())
}

/// Pseudo-hyperbolic distance `|u − z0| / |1 − z̄0 u|`.
fn pseudo_distance(u: C64, z0: C64) -> f64 {
    (u - z0).norm() / (1.0 - z0.conj() * u).norm()
}

/// `M(z) = exp ∫_0^∞ (B(F_t z) − B0) dt` for scalar `B` and an attracting
/// interior fixed point.
///
/// The integral runs to the first `T ≤ t_max` whose tail bound is below `tol`.
/// The tail is bounded by a Schwarz-lemma Lipschitz constant of `B` near `z0`
/// and the decay `δ(F_{T+s} z) ≤ δ e^{−Re λ s (1−δ)/(1+δ)}` of the
/// pseudo-hyperbolic distance `δ` to `z0`.
pub fn commutative_linearize_interior(
    model: &SemigroupModel,
    b: &dyn Generator,
    z: C64,
    t_max: f64,
    tol: f64,
) -> Result<C64> {
    require_scalar(b)?;
    let kd = model.koenigs_data()?;
    let (z0, lambda) = (kd.z0, kd.lambda);
    if lambda.re <= 0.0 {
        return Err(Error::TailNotConverging);
    }
    if z.norm() >= 1.0 {
        return Err(Error::OutOfDomain { re: z.re, im: z.im });
    }
    let b0 = scalar_eval(b, z0)?;
    let rho = 0.5 * (1.0 - z0.norm());
    let lipschitz = (0..SCHWARZ_NODES)
        .map(|j| {
            let u = z0 + C64::from_polar(rho, 2.0 * std::f64::consts::PI * j as f64 / SCHWARZ_NODES as f64);
            scalar_eval(b, u).map(|v| (v - b0).norm() / rho)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let mut state = vec![z, C64::new(0.0, 0.0)];
    let mut t = 0.0;
    let mut step = 1.0f64;
    loop {
        let delta = pseudo_distance(state[0], z0);
        let reach = delta * (1.0 + z0.norm());
        if reach <= rho && delta < 1.0 {
            let tail = lipschitz * (1.0 + z0.norm()) * delta * (1.0 + delta) / (lambda.re * (1.0 - delta));
            if tail <= tol {
                return Ok(state[1].exp());
            }
        }
        if t >= t_max {
            return Err(Error::TailNotConverging);
        }
        let dt = step.min(t_max - t);
        let (next, _) = integrate(
            |_, y, dy| {
                dy[0] = model.f.eval(y[0])?;
                dy[1] = scalar_eval(b, y[0])? - b0;
                Ok(())
            },
            &state,
            dt,
            OdeOptions::with_tol(1e-13),
            |s, y| if y[0].norm() >= 1.0 { Err(Error::DomainEscape { t: t + s }) } else { Ok(()) },
        )?;
        state = next;
        t += dt;
        step *= 2.0;
    }
}

/// `M(z) = exp(−∫_0^z B(w)/f(w) dw)` along the segment `[0, z]`.
pub fn commutative_linearize_nofix(f: &RationalMap, b: &dyn Generator, z: C64, tol: f64) -> Result<C64> {
    require_scalar(b)?;
    if z.norm() >= 1.0 {
        return Err(Error::OutOfDomain { re: z.re, im: z.im });
    }
    const SCAN: usize = 1024;
    for j in 0..=SCAN {
        if f.eval(z * (j as f64 / SCAN as f64)).map(|v| v.norm()).unwrap_or(0.0) <= 1e-10 {
            return Err(Error::PoleOnPath);
        }
    }
    let integral = adaptive_simpson_scalar(
        |s| {
            let w = z * s;
            let fw = f.eval(w)?;
            if fw.norm() <= 1e-10 {
                return Err(Error::PoleOnPath);
            }
            Ok(scalar_eval(b, w)? / fw * z)
        },
        0.0,
        1.0,
        tol,
    )?;
    Ok((-integral).exp())
}
