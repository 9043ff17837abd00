//! One PASS/FAIL line per acceptance criterion.

mod common;

use std::process::ExitCode;

use cocycle_lab::algebra::{ad_matrix, eigenvalues, operator_norm};
use cocycle_lab::cocycle::{
    boundedness_classify, check_axioms, evolve_path, extract_generator_auto, growth_report, sampled_log_norm_sup,
    AxiomSample, CocycleSource, Evolved, Generator, GrowthGrid, BOUNDARY_NODES,
};
use cocycle_lab::demos::{demo_catalog, find_demo};
use cocycle_lab::dynamics::SemigroupModel;
use cocycle_lab::linearize::{
    commutative_linearize_interior, commutative_linearize_nofix, condition_check, guarded_samples, linearize,
    reconstruct_error, sharpness_witness, LinearizationStatus, LinearizeOptions, DEFAULT_SPECTRAL_TOL,
};
use cocycle_lab::series::DEFAULT_ORDER;
use cocycle_lab::{Result, C64};
use common::*;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn times(t_max: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| t_max * i as f64 / steps as f64).collect()
}

/// Center plus 8 points on each of four circles up to `r_max`.
fn disk(r_max: f64) -> Vec<C64> {
    let mut out = vec![c(0.0)];
    for i in 1..=4 {
        for j in 0..8 {
            out.push(C64::from_polar(r_max * i as f64 / 4.0, 0.2 + j as f64 * std::f64::consts::FRAC_PI_4));
        }
    }
    out
}

/// `max ‖Γ_evolve − Γ_oracle‖ / max(1, ‖Γ_oracle‖)` over `disk(0.8)` and `t ∈ [0, 3]`.
fn evolve_error(model: &SemigroupModel, b: &dyn Generator, oracle: &dyn CocycleSource) -> Result<f64> {
    let ts = times(3.0, 12);
    let mut worst = 0.0f64;
    for z in disk(0.8) {
        for (g, &t) in evolve_path(model, b, &ts, z, 1e-12)?.iter().zip(&ts) {
            let want = oracle.gamma(t, z)?;
            worst = worst.max(operator_norm(&(g - &want)) / operator_norm(&want).max(1.0));
        }
    }
    Ok(worst)
}

fn jordan_obstruction() -> Result<Outcome> {
    let demo = find_demo("jordan-obstruction")?;
    let model = demo.scenario.model()?;
    let b = demo.scenario.generator()?;
    let err = evolve_error(&model, b.as_ref(), &demo.oracle)?;
    let b0 = b.eval(c(0.0))?;
    let cond = condition_check(&b0, c(1.0), DEFAULT_SPECTRAL_TOL)?;
    let lin = linearize(&model, b.as_ref(), &LinearizeOptions::default())?;
    let pass = err <= 1e-8 && cond.violated_k == [1] && lin.status == LinearizationStatus::Obstructed { at_order: 1 };
    outcome(pass, format!("evolve error {err:.1e}, violated_k {:?}, status {}", cond.violated_k, lin.status))
}

fn scalar_rational() -> Result<Outcome> {
    let demo = find_demo("linear-scalar-rational")?;
    let model = demo.scenario.model()?;
    let b = demo.scenario.generator()?;
    let err = evolve_error(&model, b.as_ref(), &demo.oracle)?;
    let report = growth_report(&model, b.as_ref(), None, 0.5, None, &GrowthGrid::default())?;
    let pass = err <= 1e-8 && (report.k_mu - 2.0).abs() <= 1e-6 && report.max_violation == 0.0;
    outcome(
        pass,
        format!("evolve error {err:.1e}, K_mu(0.5) = {:.9}, max violation {:.1e}", report.k_mu, report.max_violation),
    )
}

fn nonexponential_growth() -> Result<Outcome> {
    let b = cocycle_lab::demos::sqrt_generator();
    let k_mu = sampled_log_norm_sup(&b, c(0.0), 0.999, BOUNDARY_NODES)?;
    let demo = find_demo("sqrt-nonexp")?;
    let mut fits = Vec::new();
    for r in [0.5, 0.9, 0.99] {
        let fit = boundedness_classify(&demo.oracle, &disk(r), &times(3.0, 12))?;
        fits.push((r, fit));
    }
    let finite = fits.iter().all(|(_, f)| !f.unbounded && f.m.is_finite() && f.k.is_finite());
    let listed: Vec<String> = fits.iter().map(|(r, f)| format!("r={r}: M={:.3}, K={:.3}", f.m, f.k)).collect();
    outcome(k_mu > 10.0 && finite, format!("K_mu(0.999) = {k_mu:.2}; {}", listed.join("; ")))
}

fn linearization_round_trip() -> Result<Outcome> {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    let mut statuses_ok = 0;
    for i in 0..20 {
        let n = 2 + i % 2;
        let (model, b) = random_linearizable_case(&mut r, n);
        let lin = linearize(&model, &b, &LinearizeOptions::default())?;
        if lin.status != LinearizationStatus::Linearizable {
            continue;
        }
        statuses_ok += 1;
        let samples = guarded_samples(&model, &lin, &[0.0, 0.5, 1.0, 2.0], 1.0, 8)?;
        worst = worst.max(reconstruct_error(&model, &b, &lin, &samples)?);
    }
    outcome(statuses_ok == 20 && worst <= 1e-5, format!("{statuses_ok}/20 linearizable, max error {worst:.1e}"))
}

fn sharpness() -> Result<Outcome> {
    let mut r = rng(5);
    let mut exact = 0;
    let mut seen = Vec::new();
    for i in 0..10 {
        let n = 2 + i % 2;
        let k = 1 + i % 4;
        let lambda = C64::new(r.gen_range(0.5..1.5), r.gen_range(-0.5..0.5));
        let mut d: Vec<C64> = (0..n).map(|_| random_complex(&mut r, 0.3)).collect();
        d[1] = d[0] + lambda * k as f64;
        let b0 = with_spectrum(&mut r, &d);
        let b = sharpness_witness(&b0, lambda, k)?;
        let lin = linearize(&SemigroupModel::linear(lambda), &b, &LinearizeOptions::default())?;
        if lin.status == (LinearizationStatus::Obstructed { at_order: k }) {
            exact += 1;
        }
        seen.push(format!("{k}->{}", lin.status));
    }
    outcome(exact == 10, format!("{exact}/10 obstructed at the constructed order [{}]", seen.join(", ")))
}

fn extraction_round_trip() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut names = Vec::new();
    for demo in demo_catalog() {
        let model = demo.scenario.model()?;
        let b = demo.scenario.generator()?;
        let source = Evolved::new(&model, b.as_ref());
        let f = demo.scenario.rational_map()?;
        let mut demo_worst = 0.0f64;
        for j in 0..10 {
            let z = C64::from_polar(0.1 + 0.04 * j as f64, 0.5 + 0.9 * j as f64);
            let got = extract_generator_auto(&source, &f, z)?;
            demo_worst = demo_worst.max((&got - &b.eval(z)?).max_abs());
        }
        worst = worst.max(demo_worst);
        names.push(format!("{} {demo_worst:.1e}", demo.name));
    }
    outcome(worst <= 1e-6, format!("max error {worst:.1e} ({})", names.join(", ")))
}

fn chain_rule_suites() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut margin = f64::INFINITY;
    let mut runs = 0;
    let sample = AxiomSample::standard();
    for demo in demo_catalog() {
        let model = demo.scenario.model()?;
        let b = demo.scenario.generator()?;
        for report in [
            check_axioms(&model, &Evolved::new(&model, b.as_ref()), &sample, 1e-7)?,
            check_axioms(&model, &demo.oracle, &sample, 1e-7)?,
        ] {
            worst = worst.max(report.chain_rule_residual);
            margin = margin.min(report.min_singular_value);
            runs += 1;
        }
    }
    let mut r = rng(7);
    for i in 0..10 {
        let tau = unit_disk_point(&mut r, 0.4);
        let model = SemigroupModel::build(random_semigroup_map(&mut r, tau), Some(tau), DEFAULT_ORDER)?;
        let b = random_polynomial_generator(&mut r, 1 + i % 3, i % 4, 0.6);
        let report = check_axioms(&model, &Evolved::new(&model, &b), &sample, 1e-7)?;
        worst = worst.max(report.chain_rule_residual);
        margin = margin.min(report.min_singular_value);
        runs += 1;
    }
    outcome(worst <= 1e-7 && margin > 0.0, format!("{runs} suites, max residual {worst:.1e}, min σ {margin:.3e}"))
}

fn commutative_cross_validation() -> Result<Outcome> {
    let mut series_gap = 0.0f64;
    for name in ["linear-scalar-rational", "beta-power", "sqrt-nonexp"] {
        let demo = find_demo(name)?;
        let model = demo.scenario.model()?;
        let b = demo.scenario.generator()?;
        let lin = linearize(&model, b.as_ref(), &LinearizeOptions::default())?;
        for j in 0..8 {
            let z = C64::from_polar(0.3 * (1 + j % 3) as f64 / 3.0, 0.3 + 0.8 * j as f64);
            let w = model.koenigs_eval(z)?;
            if w.norm() > lin.guard_radius() {
                continue;
            }
            let direct = commutative_linearize_interior(&model, b.as_ref(), z, 200.0, 1e-10)?;
            series_gap = series_gap.max((lin.m.evaluate(w)[(0, 0)] - direct).norm());
        }
    }

    let affine = find_demo("affine-scalar")?;
    let f = affine.scenario.rational_map()?;
    let b = affine.scenario.generator()?;
    let transfer_closed = |z: C64| (1.0 - 1.0 / (1.0 - z)).exp();
    let mut transfer_gap = 0.0f64;
    let mut gamma_gap = 0.0f64;
    for z in [c(0.0), c(0.3), C64::new(-0.2, 0.4), C64::new(0.1, -0.5)] {
        let m_z = commutative_linearize_nofix(&f, b.as_ref(), z, 1e-12)?;
        transfer_gap = transfer_gap.max((m_z - transfer_closed(z)).norm());
        for t in times(2.0, 8) {
            // F_t(z) = 1 − (1 − z) e^{−t}
            let ft = 1.0 - (1.0 - z) * (-t).exp();
            let m_ft = commutative_linearize_nofix(&f, b.as_ref(), ft, 1e-12)?;
            let rebuilt = m_z / m_ft;
            let want = ((t.exp() - 1.0) / (1.0 - z)).exp();
            gamma_gap = gamma_gap.max((rebuilt - want).norm() / want.norm().max(1.0));
        }
    }
    let pass = series_gap <= 1e-6 && transfer_gap <= 1e-6 && gamma_gap <= 1e-6;
    outcome(
        pass,
        format!("series vs direct {series_gap:.1e}, affine transfer {transfer_gap:.1e}, affine Γ {gamma_gap:.1e}"),
    )
}

fn ad_spectrum_law() -> Result<Outcome> {
    let mut r = rng(9);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let n = 1 + i % 4;
        let b0 = random_matrix(&mut r, n, 1.0);
        let ev = eigenvalues(&b0)?;
        let diffs: Vec<C64> = ev.iter().flat_map(|x| ev.iter().map(move |y| x - y)).collect();
        worst = worst.max(multiset_distance(&eigenvalues(&ad_matrix(&b0))?, &diffs));
    }
    outcome(worst <= 1e-6, format!("50 matrices, max matching distance {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 9] = [
        ("Jordan obstruction reproduction", jordan_obstruction),
        ("scalar rational reproduction", scalar_rational),
        ("non-exponential growth detection", nonexponential_growth),
        ("linearization round trip", linearization_round_trip),
        ("sharpness", sharpness),
        ("generator extraction round trip", extraction_round_trip),
        ("chain rule and invertibility", chain_rule_suites),
        ("commutative cross-validation", commutative_cross_validation),
        ("ad-spectrum law", ad_spectrum_law),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {verdict} {name}: {detail} [{:.1}s]", i + 1, start.elapsed().as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
