//! Command-line front end: runs analyses on JSON scenarios or on the demo catalog.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use cocycle_lab::algebra::{operator_norm, smallest_singular_value};
use cocycle_lab::cocycle::{
    check_axioms, evolve_path, extract_generator_auto, growth_report, AxiomReport, AxiomSample, Evolved, Generator,
    GrowthGrid, GrowthReport, BOUNDARY_NODES,
};
use cocycle_lab::demos::{demo_catalog, find_demo, run_demo, DemoOptions, DemoReport};
use cocycle_lab::dynamics::SemigroupModel;
use cocycle_lab::linearize::{
    condition_check, guarded_samples, linearize, reconstruct_error, ConditionReport, LinearizationOutcome,
    LinearizationStatus, LinearizeOptions, DEFAULT_SPECTRAL_TOL,
};
use cocycle_lab::scenario::Scenario;
use cocycle_lab::{CMatrix, C64};

const CHAIN_RULE_TOL: f64 = 1e-7;
const RECURSION_TOL: f64 = 1e-9;
const RECONSTRUCT_TOL: f64 = 1e-5;
const GROWTH_TOL: f64 = 1e-9;
const EXTRACT_TOL: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(name = "cocycle-lab", version, about = "Holomorphic semicocycles on the unit disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario JSON file.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Write sample curves as CSV (evolve, growth).
    #[arg(long, global = true)]
    csv: Option<PathBuf>,

    /// Truncation order of the power series.
    #[arg(long, global = true)]
    order: Option<usize>,

    /// Integration tolerance; Sylvester tolerance for linearize and spectrum.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Sampling disk radius; growth disk radius.
    #[arg(long, global = true)]
    radius: Option<f64>,

    /// Replace the time grid by 9 equispaced times in [0, tmax].
    #[arg(long, global = true)]
    tmax: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the evolution problem on the scenario grid.
    Evolve,
    /// Check the chain rule, Γ_0 = I and invertibility.
    Check,
    /// Run the power-series linearization.
    Linearize,
    /// Resonance check for B0 = B(z0) against multiples of λ.
    Spectrum,
    /// Compare ‖Γ_t(z)‖ with e^{K_mu t} on a boundary circle.
    Growth,
    /// Recover B(z) from evolved samples.
    Extract,
    /// Run a catalog demo; `all` runs every entry, no name lists them.
    Demo {
        name: Option<String>,
        /// Add a growth report, e.g. `r=0.5`.
        #[arg(long)]
        growth: Option<String>,
    },
}

/// Problems with the invocation or the scenario (exit status 2).
#[derive(Debug)]
struct InputError(anyhow::Error);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

fn input<E: Into<anyhow::Error>>(e: E) -> anyhow::Error {
    anyhow::Error::new(InputError(e.into()))
}

fn is_input_error(e: &anyhow::Error) -> bool {
    e.chain().any(|cause| {
        cause.is::<InputError>()
            || matches!(
                cause.downcast_ref::<cocycle_lab::Error>(),
                Some(
                    cocycle_lab::Error::InvalidInput(_)
                        | cocycle_lab::Error::DimensionMismatch { .. }
                        | cocycle_lab::Error::OutOfDomain { .. }
                        | cocycle_lab::Error::NoFixedPointModel
                )
            )
    })
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    command: &'static str,
    pass: bool,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct EvolveSample {
    t: f64,
    z: C64,
    gamma: CMatrix,
    gamma_norm: f64,
    min_singular_value: f64,
}

#[derive(Serialize)]
struct EvolveBody {
    samples: Vec<EvolveSample>,
}

#[derive(Serialize)]
struct CheckBody {
    axioms: AxiomReport,
}

#[derive(Serialize)]
struct LinearizeBody {
    outcome: LinearizationOutcome,
    reconstruct_error: Option<f64>,
}

#[derive(Serialize)]
struct SpectrumBody {
    b0: CMatrix,
    condition: ConditionReport,
}

#[derive(Serialize)]
struct GrowthBody {
    center: C64,
    radius: f64,
    k_mu: f64,
    max_violation: f64,
    samples: usize,
}

#[derive(Serialize)]
struct ExtractSample {
    z: C64,
    extracted: CMatrix,
    error: f64,
}

#[derive(Serialize)]
struct ExtractBody {
    samples: Vec<ExtractSample>,
    max_error: f64,
}

#[derive(Serialize)]
struct CatalogEntry {
    name: &'static str,
    summary: &'static str,
}

struct Loaded {
    scenario: Scenario,
    model: SemigroupModel,
    generator: std::sync::Arc<dyn Generator>,
}

fn load(cli: &Cli) -> Result<Loaded> {
    let path = cli.scenario.as_ref().ok_or_else(|| input(anyhow!("--scenario is required")))?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(input)?;
    let mut scenario =
        Scenario::from_json(&text).with_context(|| format!("parsing {}", path.display())).map_err(input)?;
    if let Some(order) = cli.order {
        scenario.truncation_order = order;
    }
    if let Some(r) = cli.radius {
        if !(r > 0.0 && r < 1.0) {
            return Err(input(anyhow!("--radius must lie in (0, 1)")));
        }
        scenario.grid.disk_radius = r;
    }
    if let Some(tmax) = cli.tmax {
        if !(tmax >= 0.0 && tmax.is_finite()) {
            return Err(input(anyhow!("--tmax must be finite and nonnegative")));
        }
        scenario.grid.t_values = (0..=8).map(|i| tmax * i as f64 / 8.0).collect();
    }
    if let Some(tol) = cli.tol {
        if !(tol > 0.0) {
            return Err(input(anyhow!("--tol must be positive")));
        }
    }
    let model = scenario.model().context("building the semigroup model")?;
    let generator = scenario.generator().context("building the generator")?;
    Ok(Loaded { scenario, model, generator })
}

fn sorted_times(sc: &Scenario) -> Vec<f64> {
    let mut ts = sc.grid.t_values.clone();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

fn center(model: &SemigroupModel) -> C64 {
    model.z0().unwrap_or(C64::new(0.0, 0.0))
}

fn emit<T: Serialize>(cli: &Cli, command: &'static str, pass: bool, body: T) -> Result<bool> {
    let text = serde_json::to_string_pretty(&Report { command, pass, body })?;
    write_or_print(cli.out.as_deref(), &text)?;
    Ok(pass)
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other.context("writing stdout"),
            }
        }
    }
}

fn write_csv(cli: &Cli, text: &str) -> Result<()> {
    if let Some(p) = &cli.csv {
        fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn cmd_evolve(cli: &Cli) -> Result<bool> {
    let l = load(cli)?;
    let tol = cli.tol.unwrap_or(l.scenario.tolerances.ode);
    let ts = sorted_times(&l.scenario);
    let mut samples = Vec::new();
    for z in l.scenario.grid.points(center(&l.model)) {
        let path = evolve_path(&l.model, l.generator.as_ref(), &ts, z, tol)
            .with_context(|| format!("evolving from z = {z}"))?;
        for (&t, gamma) in ts.iter().zip(path) {
            samples.push(EvolveSample {
                t,
                z,
                gamma_norm: operator_norm(&gamma),
                min_singular_value: smallest_singular_value(&gamma)?,
                gamma,
            });
        }
    }
    let mut csv = String::from("t,z_re,z_im,gamma_norm\n");
    for s in &samples {
        csv.push_str(&format!("{},{},{},{}\n", s.t, s.z.re, s.z.im, s.gamma_norm));
    }
    write_csv(cli, &csv)?;
    let pass = samples.iter().all(|s| s.min_singular_value > 0.0);
    emit(cli, "evolve", pass, EvolveBody { samples })
}

fn cmd_check(cli: &Cli) -> Result<bool> {
    let l = load(cli)?;
    let tol = cli.tol.unwrap_or(l.scenario.tolerances.ode);
    let ts = sorted_times(&l.scenario);
    let sample = AxiomSample { t_values: ts.clone(), s_values: ts, z_values: l.scenario.grid.points(center(&l.model)) };
    let source = Evolved { model: &l.model, generator: l.generator.as_ref(), tol };
    let axioms = check_axioms(&l.model, &source, &sample, CHAIN_RULE_TOL)?;
    emit(cli, "check", axioms.pass, CheckBody { axioms })
}

fn linearize_options(cli: &Cli, sc: &Scenario) -> LinearizeOptions {
    LinearizeOptions {
        order: sc.truncation_order,
        tol: cli.tol.unwrap_or(sc.tolerances.sylvester),
        resonance_rtol: sc.tolerances.resonance,
    }
}

fn cmd_linearize(cli: &Cli) -> Result<bool> {
    let l = load(cli)?;
    let outcome = linearize(&l.model, l.generator.as_ref(), &linearize_options(cli, &l.scenario))?;
    let reconstruct = match outcome.status {
        LinearizationStatus::Linearizable | LinearizationStatus::Coboundary => {
            let samples = guarded_samples(&l.model, &outcome, &sorted_times(&l.scenario), 1.0, 8)?;
            Some(reconstruct_error(&l.model, l.generator.as_ref(), &outcome, &samples)?)
        }
        _ => None,
    };
    let pass = outcome.diagnostics.max_residual <= RECURSION_TOL && reconstruct.is_none_or(|e| e <= RECONSTRUCT_TOL);
    emit(cli, "linearize", pass, LinearizeBody { outcome, reconstruct_error: reconstruct })
}

fn cmd_spectrum(cli: &Cli) -> Result<bool> {
    let l = load(cli)?;
    let kd = l.model.koenigs_data()?;
    let b0 = l.generator.eval(kd.z0)?;
    let condition = condition_check(&b0, kd.lambda, cli.tol.unwrap_or(DEFAULT_SPECTRAL_TOL))?;
    emit(cli, "spectrum", condition.rank_route_agrees, SpectrumBody { b0, condition })
}

fn cmd_growth(cli: &Cli) -> Result<bool> {
    let l = load(cli)?;
    let r = cli.radius.unwrap_or(l.scenario.grid.disk_radius);
    let grid = GrowthGrid { t_values: sorted_times(&l.scenario), nodes: BOUNDARY_NODES };
    let report: GrowthReport = growth_report(&l.model, l.generator.as_ref(), None, r, None, &grid)?;
    write_csv(cli, &report.to_csv())?;
    let body = GrowthBody {
        center: report.center,
        radius: report.radius,
        k_mu: report.k_mu,
        max_violation: report.max_violation,
        samples: report.samples.len(),
    };
    emit(cli, "growth", report.max_violation <= GROWTH_TOL, body)
}

fn cmd_extract(cli: &Cli) -> Result<bool> {
    let l = load(cli)?;
    let tol = cli.tol.unwrap_or(l.scenario.tolerances.ode);
    let source = Evolved { model: &l.model, generator: l.generator.as_ref(), tol };
    let mut samples = Vec::new();
    for z in l.scenario.grid.points(center(&l.model)) {
        let extracted =
            extract_generator_auto(&source, &l.model.f, z).with_context(|| format!("extracting at z = {z}"))?;
        let error = (&extracted - &l.generator.eval(z)?).max_abs();
        samples.push(ExtractSample { z, extracted, error });
    }
    let max_error = samples.iter().map(|s| s.error).fold(0.0, f64::max);
    emit(cli, "extract", max_error <= EXTRACT_TOL, ExtractBody { samples, max_error })
}

fn parse_growth(spec: &str) -> Result<f64> {
    let value = spec.strip_prefix("r=").unwrap_or(spec);
    let r: f64 = value.parse().map_err(|_| input(anyhow!("--growth expects r=<radius>, got {spec:?}")))?;
    if !(r > 0.0 && r < 1.0) {
        return Err(input(anyhow!("growth radius must lie in (0, 1)")));
    }
    Ok(r)
}

fn cmd_demo(cli: &Cli, name: Option<&str>, growth: Option<&str>) -> Result<bool> {
    let Some(name) = name else {
        let list: Vec<CatalogEntry> =
            demo_catalog().iter().map(|d| CatalogEntry { name: d.name, summary: d.summary }).collect();
        write_or_print(cli.out.as_deref(), &serde_json::to_string_pretty(&list)?)?;
        return Ok(true);
    };
    let opts = DemoOptions { growth_radius: growth.map(parse_growth).transpose()?, extract_points: 0 };
    let demos = if name == "all" { demo_catalog() } else { vec![find_demo(name).map_err(input)?] };
    let reports = demos
        .iter()
        .map(|d| run_demo(d, &opts).with_context(|| format!("running demo {}", d.name)))
        .collect::<Result<Vec<DemoReport>>>()?;
    let pass = reports.iter().all(|r| r.pass);
    for r in &reports {
        let failed: Vec<&str> = r.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        if failed.is_empty() {
            eprintln!("{}: pass ({})", r.name, r.status);
        } else {
            eprintln!("{}: FAIL ({})", r.name, failed.join(", "));
        }
    }
    let text = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])?
    } else {
        serde_json::to_string_pretty(&reports)?
    };
    write_or_print(cli.out.as_deref(), &text)?;
    Ok(pass)
}

fn configure_threads() -> Result<()> {
    if let Ok(value) = std::env::var("COCYCLE_LAB_THREADS") {
        let n: usize = value
            .parse()
            .map_err(|_| input(anyhow!("COCYCLE_LAB_THREADS must be a positive integer, got {value:?}")))?;
        if n == 0 {
            bail!(InputError(anyhow!("COCYCLE_LAB_THREADS must be positive")));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    configure_threads()?;
    match &cli.command {
        Command::Evolve => cmd_evolve(cli),
        Command::Check => cmd_check(cli),
        Command::Linearize => cmd_linearize(cli),
        Command::Spectrum => cmd_spectrum(cli),
        Command::Growth => cmd_growth(cli),
        Command::Extract => cmd_extract(cli),
        Command::Demo { name, growth } => cmd_demo(cli, name.as_deref(), growth.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_input_error(&e) { 2 } else { 1 })
        }
    }
}
