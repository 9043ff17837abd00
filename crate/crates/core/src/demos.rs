//! Catalog of worked examples with closed-form semicocycles, and an
//! end-to-end runner that checks each one.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{operator_norm, CMatrix, C64};
use crate::cocycle::{
    check_axioms, extract_generator_auto, growth_report, sampled_log_norm_sup, AnalyticGenerator, AxiomReport,
    AxiomSample, CocycleOracle, CocycleSource, Evolved, Generator, GrowthGrid, BOUNDARY_NODES,
};
use crate::dynamics::SemigroupModel;
use crate::error::{Error, Result};
use crate::linearize::{
    commutative_linearize_nofix, condition_check, guarded_samples, linearize, reconstruct_error, ConditionReport,
    LinearizationOutcome, LinearizationStatus, LinearizeOptions, DEFAULT_SPECTRAL_TOL,
};
use crate::scenario::{GeneratorSpec, GridSpec, Scenario, SemigroupSpec, Tolerances};
use crate::series::DEFAULT_ORDER;

/// Exponent used by the `beta-power` entry.
pub const BETA: f64 = 0.5;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// What a demo is expected to show.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub status: LinearizationStatus,
    pub violated_k: Vec<usize>,
    /// First transfer coefficient `m_1`, when known in closed form.
    pub m1: Option<CMatrix>,
}

#[derive(Debug, Clone)]
pub struct DemoEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub scenario: Scenario,
    pub oracle: CocycleOracle,
    pub expected: Expected,
}

fn poly(coeffs: &[f64]) -> Vec<C64> {
    coeffs.iter().map(|&x| c(x)).collect()
}

fn scenario(f_num: &[f64], dim: usize, num: Vec<CMatrix>, den: &[f64], z_values: Vec<C64>) -> Scenario {
    Scenario {
        semigroup: SemigroupSpec { f_num: poly(f_num), f_den: poly(&[1.0]), fixed_point_hint: None },
        generator: GeneratorSpec::Rational { dim, num_coeffs: num, den_coeffs: poly(den) },
        truncation_order: DEFAULT_ORDER,
        grid: GridSpec { z_values: Some(z_values), ..GridSpec::default() },
        tolerances: Tolerances::default(),
    }
}

fn s(x: f64) -> CMatrix {
    CMatrix::scalar(1, c(x))
}

fn disk_points(r: f64) -> Vec<C64> {
    let mut out = vec![c(0.0)];
    for &rho in &[0.5 * r, r] {
        for j in 0..6 {
            out.push(C64::from_polar(rho, 0.3 + j as f64 * std::f64::consts::PI / 3.0));
        }
    }
    out
}

/// Square root of `1 − z` on the principal branch.
fn sqrt_one_minus(z: C64) -> C64 {
    (1.0 - z).sqrt()
}

/// `B(z) = 1 + z / (2√(1−z)(1 + √(1−z)))`.
pub fn sqrt_generator() -> AnalyticGenerator {
    AnalyticGenerator::new(
        "sqrt-nonexp",
        1,
        |z| {
            if z.norm() >= 1.0 {
                return Err(Error::OutOfDomain { re: z.re, im: z.im });
            }
            let q = sqrt_one_minus(z);
            Ok(CMatrix::scalar(1, 1.0 + z / (2.0 * q * (1.0 + q))))
        },
        |center| (1.0 - center).norm(),
    )
}

/// Generators that are not rational, by catalog name.
pub fn named_generator(name: &str) -> Result<Arc<dyn Generator>> {
    match name {
        "sqrt-nonexp" => Ok(Arc::new(sqrt_generator())),
        _ => Err(Error::InvalidInput(format!("unknown named generator {name:?}"))),
    }
}

/// All catalog entries.
pub fn demo_catalog() -> Vec<DemoEntry> {
    let linear = [0.0, -1.0];
    let mut out = Vec::new();

    out.push(DemoEntry {
        name: "linear-scalar-rational",
        summary: "B = 1/(1 − z) over F_t(z) = e^{−t} z",
        scenario: scenario(&linear, 1, vec![s(1.0)], &[1.0, -1.0], disk_points(0.8)),
        oracle: CocycleOracle::new("linear-scalar-rational", 1, |t, z| {
            Ok(CMatrix::scalar(1, (t.exp() - z) / (1.0 - z)))
        }),
        expected: Expected { status: LinearizationStatus::Linearizable, violated_k: vec![], m1: Some(s(1.0)) },
    });

    let mut affine = scenario(&[1.0, -1.0], 1, vec![s(1.0)], &[1.0, -1.0], disk_points(0.6));
    affine.grid.t_values = vec![0.0, 0.5, 1.0, 2.0];
    out.push(DemoEntry {
        name: "affine-scalar",
        summary: "B = 1/(1 − z) over F_t(z) = 1 − (1 − z) e^{−t}; a coboundary with no interior fixed point",
        scenario: affine,
        oracle: CocycleOracle::new("affine-scalar", 1, |t, z| {
            Ok(CMatrix::scalar(1, ((t.exp() - 1.0) / (1.0 - z)).exp()))
        }),
        expected: Expected { status: LinearizationStatus::Coboundary, violated_k: vec![], m1: None },
    });

    out.push(DemoEntry {
        name: "sqrt-nonexp",
        summary: "Γ_t(z) = e^t (1 + √(1 − e^{−t} z)) / (1 + √(1 − z)); no uniform exponential estimate",
        scenario: Scenario {
            semigroup: SemigroupSpec { f_num: poly(&linear), f_den: poly(&[1.0]), fixed_point_hint: None },
            generator: GeneratorSpec::Named { named: "sqrt-nonexp".into() },
            truncation_order: DEFAULT_ORDER,
            grid: GridSpec { z_values: Some(disk_points(0.8)), ..GridSpec::default() },
            tolerances: Tolerances::default(),
        },
        oracle: CocycleOracle::new("sqrt-nonexp", 1, |t, z| {
            let num = 1.0 + sqrt_one_minus(z * (-t).exp());
            Ok(CMatrix::scalar(1, num / (1.0 + sqrt_one_minus(z)) * t.exp()))
        }),
        expected: Expected { status: LinearizationStatus::Linearizable, violated_k: vec![], m1: None },
    });

    out.push(DemoEntry {
        name: "jordan-obstruction",
        summary: "B = [[1, z], [0, 2]] over e^{−t} z; not linearizable (resonance at k = 1)",
        scenario: scenario(
            &linear,
            2,
            vec![CMatrix::from_real_diag(&[1.0, 2.0]), CMatrix::unit(2, 0, 1)],
            &[1.0],
            disk_points(0.8),
        ),
        oracle: CocycleOracle::new("jordan-obstruction", 2, |t, z| {
            let et = t.exp();
            CMatrix::from_rows(vec![vec![c(et), z * t * et], vec![c(0.0), c(et * et)]])
        }),
        expected: Expected { status: LinearizationStatus::Obstructed { at_order: 1 }, violated_k: vec![1], m1: None },
    });

    out.push(DemoEntry {
        name: "resonant-solvable",
        summary: "B = [[1, 0], [z, 2]] over e^{−t} z; resonant at k = 1 but solvable",
        scenario: scenario(
            &linear,
            2,
            vec![CMatrix::from_real_diag(&[1.0, 2.0]), CMatrix::unit(2, 1, 0)],
            &[1.0],
            disk_points(0.8),
        ),
        oracle: CocycleOracle::new("resonant-solvable", 2, |t, z| {
            let et = t.exp();
            CMatrix::from_rows(vec![vec![c(et), c(0.0)], vec![z * (et * et - 1.0) * 0.5, c(et * et)]])
        }),
        expected: Expected {
            status: LinearizationStatus::ResonantSolvable,
            violated_k: vec![1],
            m1: Some(CMatrix::unit(2, 1, 0).scale_real(0.5)),
        },
    });

    // B = [β(z² + z − 2) + z − z²] / (2 + z)
    let beta = BETA;
    out.push(DemoEntry {
        name: "beta-power",
        summary: "Γ_t(z) = (F_t(z)/z)^β m(F_t z)⁻¹ m(z) with m(z) = 1 + z/2 over f = z² − z",
        scenario: scenario(
            &[0.0, -1.0, 1.0],
            1,
            vec![s(-2.0 * beta), s(beta + 1.0), s(beta - 1.0)],
            &[2.0, 1.0],
            disk_points(0.6),
        ),
        oracle: CocycleOracle::new("beta-power", 1, move |t, z| {
            let e = (-t).exp();
            let ft = e * z / (1.0 - z + e * z);
            let v = (-beta * t).exp() * (1.0 - z * (1.0 - e)).powf(-beta) * (1.0 + z / 2.0) / (1.0 + ft / 2.0);
            Ok(CMatrix::scalar(1, v))
        }),
        // m(w) = (1 + w)^{β−1} (1 + 3w/2) ⇒ m_1 = β − 1 + 3/2
        expected: Expected { status: LinearizationStatus::Linearizable, violated_k: vec![], m1: Some(s(beta + 0.5)) },
    });

    out.push(DemoEntry {
        name: "diagonal-linearizable",
        summary: "B = diag(z, 1/2) over e^{−t} z; eigenvalue gap 1/2 is not a multiple of λ",
        scenario: scenario(
            &linear,
            2,
            vec![CMatrix::from_real_diag(&[0.0, 0.5]), CMatrix::unit(2, 0, 0)],
            &[1.0],
            disk_points(0.8),
        ),
        oracle: CocycleOracle::new("diagonal-linearizable", 2, |t, z| {
            Ok(CMatrix::from_diag(&[(z * (1.0 - (-t).exp())).exp(), c((0.5 * t).exp())]))
        }),
        expected: Expected {
            status: LinearizationStatus::Linearizable,
            violated_k: vec![],
            m1: Some(CMatrix::unit(2, 0, 0)),
        },
    });

    out
}

pub fn find_demo(name: &str) -> Result<DemoEntry> {
    demo_catalog()
        .into_iter()
        .find(|d| d.name == name)
        .ok_or_else(|| Error::InvalidInput(format!("unknown demo {name:?}")))
}

/// One verified property of a demo run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, pass: value <= tolerance, detail: String::new() }
    }

    fn flag(name: &str, pass: bool, detail: String) -> Self {
        Self { name: name.into(), value: if pass { 1.0 } else { 0.0 }, tolerance: 1.0, pass, detail }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSummary {
    pub radius: f64,
    pub k_mu: f64,
    pub max_violation: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    pub name: String,
    pub status: LinearizationStatus,
    pub violated_k: Vec<usize>,
    pub axioms: AxiomReport,
    pub condition: Option<ConditionReport>,
    pub linearization: Option<LinearizationOutcome>,
    pub growth: Option<GrowthSummary>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

#[derive(Debug, Clone, Default)]
pub struct DemoOptions {
    /// Disk radius for an additional growth report.
    pub growth_radius: Option<f64>,
    /// Points at which to run generator extraction.
    pub extract_points: usize,
}

/// `max ‖Γ_evolve − Γ_oracle‖ / max(1, ‖Γ_oracle‖)` over the scenario grid.
pub fn evolve_oracle_error(
    model: &SemigroupModel,
    b: &dyn Generator,
    oracle: &CocycleOracle,
    sc: &Scenario,
) -> Result<f64> {
    use rayon::prelude::*;
    let center = model.z0().unwrap_or(c(0.0));
    let points = sc.grid.points(center);
    let mut ts = sc.grid.t_values.clone();
    ts.sort_by(f64::total_cmp);
    let errs = points
        .par_iter()
        .map(|&z| {
            let path = crate::cocycle::evolve_path(model, b, &ts, z, sc.tolerances.ode)?;
            let mut worst = 0.0f64;
            for (&t, g) in ts.iter().zip(&path) {
                let want = oracle.gamma(t, z)?;
                worst = worst.max(operator_norm(&(g - &want)) / operator_norm(&want).max(1.0));
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

/// Runs every applicable analysis on a demo and compares with its expectations.
pub fn run_demo(demo: &DemoEntry, opts: &DemoOptions) -> Result<DemoReport> {
    let sc = &demo.scenario;
    let model = sc.model()?;
    let b = sc.generator()?;
    let mut checks = Vec::new();

    checks.push(Check::at_most(
        "evolve_vs_closed_form",
        evolve_oracle_error(&model, b.as_ref(), &demo.oracle, sc)?,
        1e-8,
    ));

    let evolved = Evolved { model: &model, generator: b.as_ref(), tol: sc.tolerances.ode };
    let axioms = check_axioms(&model, &evolved, &AxiomSample::standard(), 1e-7)?;
    checks.push(Check::at_most("chain_rule_residual", axioms.chain_rule_residual, 1e-7));
    checks.push(Check::flag(
        "invertibility_margin",
        axioms.min_singular_value > 0.0,
        format!("min singular value {:e}", axioms.min_singular_value),
    ));

    let (status, violated_k, condition, linearization) = if model.interior.is_some() {
        let lin = linearize(
            &model,
            b.as_ref(),
            &LinearizeOptions {
                order: sc.truncation_order,
                tol: sc.tolerances.sylvester,
                resonance_rtol: sc.tolerances.resonance,
            },
        )?;
        let cond = condition_check(&lin.b0, lin.lambda, DEFAULT_SPECTRAL_TOL)?;
        checks.push(Check::flag("rank_route_agrees", cond.rank_route_agrees, String::new()));
        if let Some(m1) = &demo.expected.m1 {
            let got = lin.m.coeffs.get(1).cloned().unwrap_or_else(|| CMatrix::zeros(m1.dim()));
            checks.push(Check::at_most("m1_matches", (&got - m1).max_abs(), 1e-8));
        }
        checks.push(Check::at_most("recursion_residual", lin.diagnostics.max_residual, 1e-9));
        if matches!(lin.status, LinearizationStatus::Linearizable | LinearizationStatus::Coboundary) {
            let samples = guarded_samples(&model, &lin, &[0.0, 0.5, 1.0, 2.0], 1.0, 8)?;
            checks.push(Check::at_most(
                "reconstruct_error",
                reconstruct_error(&model, b.as_ref(), &lin, &samples)?,
                1e-5,
            ));
        }
        (lin.status, cond.violated_k.clone(), Some(cond), Some(lin))
    } else {
        // Boundary attracting point: scalar transfer by quadrature along [0, z].
        let f = &model.f;
        let mut worst = 0.0f64;
        for &z in &sc.grid.points(c(0.0)) {
            for &t in &sc.grid.t_values {
                let ft = model.flow(t, z)?;
                let rebuilt = commutative_linearize_nofix(f, b.as_ref(), z, 1e-13)?
                    / commutative_linearize_nofix(f, b.as_ref(), ft, 1e-13)?;
                let want = demo.oracle.gamma(t, z)?[(0, 0)];
                worst = worst.max((rebuilt - want).norm() / want.norm().max(1.0));
            }
        }
        checks.push(Check::at_most("coboundary_reconstruction", worst, 1e-6));
        (LinearizationStatus::Coboundary, vec![], None, None)
    };
    checks.push(Check::flag(
        "status_matches",
        status == demo.expected.status,
        format!("got {status}, expected {}", demo.expected.status),
    ));
    checks.push(Check::flag(
        "violated_k_matches",
        violated_k == demo.expected.violated_k,
        format!("got {violated_k:?}, expected {:?}", demo.expected.violated_k),
    ));

    if demo.name == "sqrt-nonexp" {
        let k = sampled_log_norm_sup(b.as_ref(), c(0.0), 0.999, BOUNDARY_NODES)?;
        checks.push(Check::flag("k_mu_diverges", k > 10.0, format!("K_mu(0.999) = {k}")));
    }

    let growth = match opts.growth_radius {
        Some(r) => {
            let grid = GrowthGrid { t_values: sc.grid.t_values.clone(), nodes: BOUNDARY_NODES };
            let rep = growth_report(&model, b.as_ref(), None, r, None, &grid)?;
            checks.push(Check::at_most("growth_max_violation", rep.max_violation, 1e-9));
            if demo.name == "linear-scalar-rational" {
                checks.push(Check::at_most("k_mu_closed_form", (rep.k_mu - 1.0 / (1.0 - r)).abs(), 1e-6));
            }
            Some(GrowthSummary {
                radius: r,
                k_mu: rep.k_mu,
                max_violation: rep.max_violation,
                samples: rep.samples.len(),
            })
        }
        None => None,
    };

    if opts.extract_points > 0 {
        let mut worst = 0.0f64;
        for j in 0..opts.extract_points {
            let z = C64::from_polar(0.5, 0.7 + 2.0 * std::f64::consts::PI * j as f64 / opts.extract_points as f64);
            let got = extract_generator_auto(&evolved, &model.f, z)?;
            worst = worst.max((&got - &b.eval(z)?).max_abs());
        }
        checks.push(Check::at_most("extracted_generator", worst, 1e-6));
    }

    let pass = checks.iter().all(|c| c.pass) && axioms.pass;
    Ok(DemoReport {
        name: demo.name.into(),
        status,
        violated_k,
        axioms,
        condition,
        linearization,
        growth,
        checks,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_all_entries() {
        let names: Vec<&str> = demo_catalog().iter().map(|d| d.name).collect();
        assert!(names.len() >= 7);
        for n in [
            "linear-scalar-rational",
            "affine-scalar",
            "sqrt-nonexp",
            "jordan-obstruction",
            "resonant-solvable",
            "beta-power",
            "diagonal-linearizable",
        ] {
            assert!(names.contains(&n), "{n}");
        }
    }

    #[test]
    fn oracles_start_at_identity() {
        for d in demo_catalog() {
            let g = d.oracle.gamma(0.0, C64::new(0.3, -0.2)).unwrap();
            assert!((&g - &CMatrix::identity(g.dim())).max_abs() < 1e-15, "{}", d.name);
        }
    }

    #[test]
    fn jordan_oracle_value() {
        let d = find_demo("jordan-obstruction").unwrap();
        let g = d.oracle.gamma(1.0, c(0.5)).unwrap();
        let e = 1f64.exp();
        let want = CMatrix::from_real_rows(&[&[e, 0.5 * e], &[0.0, e * e]]).unwrap();
        assert!((&g - &want).max_abs() < 1e-14);
    }

    #[test]
    fn generators_are_time_derivatives_of_oracles() {
        for d in demo_catalog() {
            let b = d.scenario.generator().unwrap();
            let z = C64::new(0.35, 0.2);
            let h = 1e-5;
            let fd = (&d.oracle.gamma(h, z).unwrap() - &d.oracle.gamma(0.0, z).unwrap()).scale_real(1.0 / h);
            let fd2 = (&d.oracle.gamma(2.0 * h, z).unwrap() - &d.oracle.gamma(0.0, z).unwrap()).scale_real(0.5 / h);
            let richardson = &fd.scale_real(2.0) - &fd2;
            assert!((&richardson - &b.eval(z).unwrap()).max_abs() < 1e-7, "{}", d.name);
        }
    }
}
