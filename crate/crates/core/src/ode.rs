//! Adaptive Dormand–Prince 5(4) integrator for complex-valued systems.

use crate::algebra::C64;
use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Fifth-order weights minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Step-size control settings.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    /// Relative and absolute local error tolerance.
    pub tol: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, max_steps: 2_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

fn combo(y: &[C64], h: f64, terms: &[(f64, &[C64])], out: &mut [C64]) {
    for i in 0..y.len() {
        let mut acc = C64::new(0.0, 0.0);
        for (w, k) in terms {
            acc += k[i] * *w;
        }
        out[i] = y[i] + acc * h;
    }
}

/// Integrates `y' = rhs(t, y)` from `t = 0` to `t_end`.
///
/// `rhs` writes the derivative into its output slice and may reject a state.
/// `check` is called on every accepted state.
pub fn integrate<F, G>(
    mut rhs: F,
    y0: &[C64],
    t_end: f64,
    opts: OdeOptions,
    mut check: G,
) -> Result<(Vec<C64>, OdeStats)>
where
    F: FnMut(f64, &[C64], &mut [C64]) -> Result<()>,
    G: FnMut(f64, &[C64]) -> Result<()>,
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut stats = OdeStats::default();
    if t_end <= 0.0 {
        return Ok((y, stats));
    }
    let zero = C64::new(0.0, 0.0);
    let mut k1 = vec![zero; n];
    let mut k2 = vec![zero; n];
    let mut k3 = vec![zero; n];
    let mut k4 = vec![zero; n];
    let mut k5 = vec![zero; n];
    let mut k6 = vec![zero; n];
    let mut k7 = vec![zero; n];
    let mut tmp = vec![zero; n];
    let mut y_new = vec![zero; n];

    let tol = opts.tol;
    let mut t = 0.0;
    rhs(t, &y, &mut k1)?;

    // Initial step from the scaled derivative size.
    let scale0 = y.iter().map(|v| tol + tol * v.norm()).collect::<Vec<_>>();
    let d0 = (y.iter().zip(&scale0).map(|(v, s)| (v.norm() / s).powi(2)).sum::<f64>() / n as f64).sqrt();
    let d1 = (k1.iter().zip(&scale0).map(|(v, s)| (v.norm() / s).powi(2)).sum::<f64>() / n as f64).sqrt();
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(t_end).max(1e-12 * t_end);

    while t < t_end {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::NoConvergence { iterations: opts.max_steps });
        }
        // Stretch a step that would leave a sliver before `t_end`.
        let last = t + 1.01 * h >= t_end;
        if last {
            h = t_end - t;
        }
        if h <= 1e-15 * t_end.max(1.0) {
            return Err(Error::StepSizeUnderflow { t });
        }

        combo(&y, h, &[(A21, &k1)], &mut tmp);
        rhs(t + C2 * h, &tmp, &mut k2)?;
        combo(&y, h, &[(A31, &k1), (A32, &k2)], &mut tmp);
        rhs(t + C3 * h, &tmp, &mut k3)?;
        combo(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)], &mut tmp);
        rhs(t + C4 * h, &tmp, &mut k4)?;
        combo(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], &mut tmp);
        rhs(t + C5 * h, &tmp, &mut k5)?;
        combo(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], &mut tmp);
        rhs(t + h, &tmp, &mut k6)?;
        combo(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)], &mut y_new);
        rhs(t + h, &y_new, &mut k7)?;

        let mut err_sq = 0.0;
        for i in 0..n {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let sc = tol + tol * y[i].norm().max(y_new[i].norm());
            err_sq += (e.norm() / sc).powi(2);
        }
        let err = (err_sq / n as f64).sqrt();

        if err <= 1.0 {
            t = if last { t_end } else { t + h };
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            stats.accepted += 1;
            check(t, &y)?;
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
    }
    Ok((y, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let z = C64::new(0.3, 0.1);
        let (y, _) = integrate(
            |_, y, dy| {
                dy[0] = -y[0];
                Ok(())
            },
            &[z],
            1.0,
            OdeOptions::with_tol(1e-12),
            |_, _| Ok(()),
        )
        .unwrap();
        assert!((y[0] - z * (-1f64).exp()).norm() < 1e-12);
    }

    #[test]
    fn rotation_system() {
        let (y, stats) = integrate(
            |_, y, dy| {
                dy[0] = C64::new(0.0, 2.0) * y[0];
                Ok(())
            },
            &[C64::new(1.0, 0.0)],
            3.0,
            OdeOptions::with_tol(1e-11),
            |_, _| Ok(()),
        )
        .unwrap();
        assert!((y[0] - C64::new(0.0, 6.0).exp()).norm() < 1e-9);
        assert!(stats.accepted > 10);
    }

    #[test]
    fn awkward_horizons_finish() {
        for k in 1..200 {
            let t_end = 0.1 * k as f64 / 7.0 + 1e-3 / 3.0;
            let (y, _) = integrate(
                |_, y, dy| {
                    dy[0] = C64::new(0.3, 1.1) * y[0];
                    Ok(())
                },
                &[C64::new(1.0, 0.0)],
                t_end,
                OdeOptions::with_tol(1e-12),
                |_, _| Ok(()),
            )
            .unwrap();
            assert!((y[0] - (C64::new(0.3, 1.1) * t_end).exp()).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_horizon_returns_initial_state() {
        let y0 = [C64::new(0.25, -0.5)];
        let (y, stats) =
            integrate(|_, _, _| unreachable!(), &y0, 0.0, OdeOptions::with_tol(1e-10), |_, _| Ok(())).unwrap();
        assert_eq!(y, y0.to_vec());
        assert_eq!(stats.accepted, 0);
    }
}
