use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use holotent::funcspace::{HoloFunction, MixedPoly};
use holotent::geometry::Aperture;
use holotent::lattice::{atomic_analysis, generate_lattice, LatticeStrategy};
use holotent::norms::{
    adapted_sphere_rule, approach_template, bergman_norm, bloch_norm, bt_norm, carleson_kernel_norm, carleson_norm, default_schedule,
    hardy_norm, pairing_closed_form, pairing_limit, pairing_numeric, tent_inf_norm, tent_norm, CarlesonGrid, NormReport, SpaceParams,
    SupGrid,
};
use holotent::operators::{apply_frac, project_poly, FracMode, FracParams, ProjParams};
use holotent::quadrature::{ball_rule_from_sphere, hyperbolic_disc_rule, ball_rule, RadialMesh};
use holotent::verify::{acceptance_suite, emit_report, run_suite, Outcome, Suite};

const OUT_ENV: &str = "HOLOTENT_OUT";

#[derive(Parser)]
#[command(name = "holotent", version, about = "Norms, operators and checks for holomorphic tent spaces on the unit ball")]
struct Cli {
    /// Directory for written reports.
    #[arg(long, global = true, env = OUT_ENV, default_value = "holotent-out")]
    out: PathBuf,
    /// Seed for every randomized step; echoed in the output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Norm of a function read from a JSON file.
    Norm(NormArgs),
    /// Weighted pairing of two functions.
    Pairing(PairingArgs),
    /// Fractional derivative or integral of a function.
    Fracderiv(FracArgs),
    /// Bergman projection of a mixed polynomial symbol.
    Project(ProjectArgs),
    /// Generate and check an r-lattice.
    Lattice(LatticeArgs),
    /// Atomic coefficients of a function on an r-lattice.
    Atoms(AtomsArgs),
    /// Run a suite of checks and write reports.
    Verify(VerifyArgs),
    /// Summarize a written report directory.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    Hardy,
    Bergman,
    Tent,
    TentInf,
    Bloch,
    Carleson,
    CarlesonKernel,
    Bt,
}

#[derive(Args)]
struct Resolution {
    /// Boundary truncation.
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    /// Panel order of the quadrature rules.
    #[arg(long, default_value_t = 16)]
    order: usize,
}

#[derive(Args)]
struct NormArgs {
    /// Function file.
    function: PathBuf,
    #[arg(long, value_enum)]
    space: Space,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Bergman weight.
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    /// Fractional derivative parameters (bt).
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Kernel exponent (carleson-kernel).
    #[arg(long = "kernel-t", default_value_t = 2.0)]
    kernel_t: f64,
    #[command(flatten)]
    res: Resolution,
}

#[derive(Clone, Copy, ValueEnum)]
enum PairingMethod {
    Closed,
    Numeric,
    Limit,
}

#[derive(Args)]
struct PairingArgs {
    f: PathBuf,
    g: PathBuf,
    /// The weight is `(1-|z|^2)^{n+alpha}`.
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "closed")]
    method: PairingMethod,
    #[command(flatten)]
    res: Resolution,
}

#[derive(Args)]
struct FracArgs {
    function: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    #[arg(long)]
    t: f64,
    /// Apply the fractional integral instead of the derivative.
    #[arg(long)]
    integral: bool,
    /// Truncation degree for atoms that do not shift exactly.
    #[arg(long, default_value_t = 60)]
    degree: usize,
}

#[derive(Args)]
struct ProjectArgs {
    /// Mixed polynomial file.
    symbol: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
}

#[derive(Args)]
struct LatticeArgs {
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long)]
    r: f64,
    /// Lattice covers `|z| <= 1 - eps`.
    #[arg(long, default_value_t = 0.02)]
    eps: f64,
    /// Independent samples for the covering and multiplicity checks.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Also write `lattice.json` to the output directory.
    #[arg(long)]
    write: bool,
}

#[derive(Args)]
struct AtomsArgs {
    function: PathBuf,
    #[arg(long)]
    r: f64,
    #[arg(long, default_value_t = 0.02)]
    eps: f64,
    #[arg(long, default_value_t = 4.0)]
    theta: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite file; the built-in acceptance suite when omitted.
    suite: Option<PathBuf>,
    /// Run only the named experiments.
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory holding `report.json`; the output directory when omitted.
    dir: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("cannot read {0}: {1}")]
    Missing(PathBuf, std::io::Error),
    #[error("cannot parse {0}: {1}")]
    Parse(PathBuf, serde_json::Error),
    #[error(transparent)]
    Core(#[from] holotent::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Missing(..) => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Missing(path.to_path_buf(), e))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Parse(path.to_path_buf(), e))
}

fn print_json<T: Serialize>(value: &T) -> CliResult<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn norm_value(a: &NormArgs, f: &HoloFunction<f64>) -> CliResult<NormReport<f64>> {
    let n = f.dim();
    let gamma = Aperture::new(a.gamma)?;
    let sphere = adapted_sphere_rule(f, a.res.order)?;
    let mesh = || RadialMesh::geometric(a.res.eps.min(0.01), 0.5);
    Ok(match a.space {
        Space::Hardy => hardy_norm(f, a.p, &sphere, &mesh()?)?,
        Space::Bergman => bergman_norm(f, a.p, a.beta, &ball_rule_from_sphere(0.0, &mesh()?, &sphere)?)?,
        Space::Tent => {
            let sp = SpaceParams::new(n, a.p, a.q, a.alpha, gamma)?;
            tent_norm(f, &sp, &approach_template(n, gamma, a.res.eps, a.res.order)?, &sphere)?
        }
        Space::TentInf => {
            let sp = SpaceParams::new(n, a.p, f64::INFINITY, 0.0, gamma)?;
            tent_inf_norm(f, &sp, &SupGrid::new(a.res.eps), &sphere)?
        }
        Space::Bloch => bloch_norm(f, a.res.eps, 12, 32)?,
        Space::Carleson => carleson_norm(f, a.q, a.alpha, &CarlesonGrid::new(10, 32, a.res.eps))?,
        Space::CarlesonKernel => carleson_kernel_norm(f, a.q, a.alpha, a.kernel_t, &CarlesonGrid::new(10, 32, a.res.eps))?,
        Space::Bt => bt_norm(f, a.p, &FracParams::new(n, a.s, a.t)?, gamma, &SupGrid::new(a.res.eps), &sphere, 60)?,
    })
}

fn cmd_norm(cli: &Cli, a: &NormArgs) -> CliResult<()> {
    let f: HoloFunction<f64> = read_json(&a.function)?;
    let mut report = norm_value(a, &f)?;
    report.seed = Some(cli.seed);
    eprintln!("norm = {:.12e}", report.value);
    print_json(&report)
}

fn cmd_pairing(cli: &Cli, a: &PairingArgs) -> CliResult<()> {
    let f: HoloFunction<f64> = read_json(&a.f)?;
    let g: HoloFunction<f64> = read_json(&a.g)?;
    let (value, extra) = match a.method {
        PairingMethod::Closed => (pairing_closed_form(&f, &g, a.alpha)?, Value::Null),
        PairingMethod::Numeric => {
            let sphere = adapted_sphere_rule(&(f.clone() + g.clone()), a.res.order)?;
            let rule = ball_rule_from_sphere(0.0, &RadialMesh::geometric(a.res.eps.min(0.01), 0.5)?, &sphere)?;
            (pairing_numeric(&f, &g, a.alpha, &rule)?, Value::Null)
        }
        PairingMethod::Limit => {
            let lim = pairing_limit(&f, &g, a.alpha, &default_schedule())?;
            (lim.value, serde_json::to_value(&lim)?)
        }
    };
    eprintln!("pairing = {value}");
    print_json(&json!({
        "re": value.re,
        "im": value.im,
        "alpha": a.alpha,
        "limit": extra,
        "seed": cli.seed,
    }))
}

fn cmd_fracderiv(cli: &Cli, a: &FracArgs) -> CliResult<()> {
    let f: HoloFunction<f64> = read_json(&a.function)?;
    let fp = FracParams::new(f.dim(), a.s, a.t)?;
    let mode = if a.integral { FracMode::Integral } else { FracMode::Derivative };
    let out = apply_frac(&fp, &f, mode, a.degree)?;
    eprintln!("{} atom(s) truncated, tail bound {:.3e}", out.truncated_atoms, out.tail_bound);
    print_json(&json!({
        "function": out.function,
        "truncated_atoms": out.truncated_atoms,
        "tail_bound": out.tail_bound,
        "seed": cli.seed,
    }))
}

fn cmd_project(cli: &Cli, a: &ProjectArgs) -> CliResult<()> {
    let sym: MixedPoly<f64> = read_json(&a.symbol)?;
    let pp = ProjParams::new(sym.n, a.beta)?;
    let p = project_poly(&pp, &sym)?;
    eprintln!("projection has {} term(s)", p.terms().count());
    print_json(&json!({ "function": HoloFunction::from_poly(p), "beta": a.beta, "seed": cli.seed }))
}

fn cmd_lattice(cli: &Cli, a: &LatticeArgs) -> CliResult<()> {
    let mut lat = generate_lattice(a.n, a.r, a.eps, LatticeStrategy::default_for(a.n, a.r), cli.seed)?;
    let check = lat.verify(a.samples, cli.seed.wrapping_add(1))?.clone();
    let separation = lat.min_separation();
    eprintln!(
        "{} points, covering {} separation {} multiplicity {} (N_obs {})",
        lat.len(),
        check.covering_ok,
        check.separation_ok,
        check.multiplicity_ok,
        lat.n_obs
    );
    let body = json!({ "lattice": lat, "min_separation": separation, "seed": cli.seed });
    if a.write {
        fs::create_dir_all(&cli.out)?;
        fs::write(cli.out.join("lattice.json"), serde_json::to_string_pretty(&body)? + "\n")?;
    }
    print_json(&body)
}

fn cmd_atoms(cli: &Cli, a: &AtomsArgs) -> CliResult<()> {
    let f: HoloFunction<f64> = read_json(&a.function)?;
    let n = f.dim();
    let lat = generate_lattice(n, a.r, a.eps, LatticeStrategy::default_for(n, a.r), cli.seed)?;
    let mesh = RadialMesh::geometric(0.005, 0.5)?;
    let rule = if n == 1 { hyperbolic_disc_rule(0.0, &mesh, 0.1, 16)? } else { ball_rule(n, 0.0, &mesh, 24)? };
    let (coeffs, refined) = atomic_analysis(&f, &lat, a.theta, a.alpha, &rule)?;
    eprintln!("{} coefficients on {} lattice points", coeffs.values.len(), lat.len());
    let rows: Vec<Value> = lat
        .points
        .iter()
        .zip(&coeffs.values)
        .map(|(p, c)| json!({ "point": p, "coefficient": c }))
        .collect();
    print_json(&json!({
        "r": a.r,
        "theta": a.theta,
        "alpha": a.alpha,
        "refined_cells": refined,
        "atoms": rows,
        "seed": cli.seed,
    }))
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> CliResult<bool> {
    let mut suite = match &a.suite {
        Some(path) => Suite::from_json(&read_text(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?,
        None => acceptance_suite(cli.seed),
    };
    if a.suite.is_some() {
        suite.seed = cli.seed;
    }
    if !a.only.is_empty() {
        suite = suite.select(&a.only)?;
    }
    let report = run_suite(&suite)?;
    let written = emit_report(&cli.out, &report)?;
    for e in &report.experiments {
        let reason = e.reason.as_deref().map(|r| format!(" ({r})")).unwrap_or_default();
        eprintln!("{:<8} {}{reason}", e.outcome.as_str().to_uppercase(), e.name);
    }
    let failures = report.failures();
    eprintln!("{} experiment(s), {failures} failure(s)", report.experiments.len());
    let outcomes: serde_json::Map<String, Value> =
        report.experiments.iter().map(|e| (e.name.clone(), Value::from(e.outcome.as_str()))).collect();
    print_json(&json!({
        "seed": report.seed,
        "outcomes": outcomes,
        "failures": failures,
        "skipped": report.experiments.iter().filter(|e| e.outcome == Outcome::Skipped).count(),
        "files": written,
    }))?;
    Ok(failures == 0)
}

fn cmd_report(cli: &Cli, a: &ReportArgs) -> CliResult<()> {
    let dir = a.dir.clone().unwrap_or_else(|| cli.out.clone());
    let path = dir.join("report.json");
    let report: Value = read_json(&path)?;
    let experiments = report["experiments"].as_array().cloned().unwrap_or_default();
    let summary_path = dir.join("summary.csv");
    let mut text = String::from("name,outcome\n");
    let mut rows = Vec::new();
    for e in &experiments {
        let name = e["name"].as_str().unwrap_or_default();
        let outcome = e["outcome"].as_str().unwrap_or_default();
        text.push_str(&format!("{name},{outcome}\n"));
        eprintln!("{outcome:<8} {name}");
        rows.push(json!({ "name": name, "outcome": outcome, "metrics": e["metrics"] }));
    }
    fs::write(&summary_path, text)?;
    print_json(&json!({ "seed": report["seed"], "experiments": rows, "summary": summary_path }))
}

fn run(cli: &Cli) -> CliResult<bool> {
    match &cli.command {
        Command::Norm(a) => cmd_norm(cli, a)?,
        Command::Pairing(a) => cmd_pairing(cli, a)?,
        Command::Fracderiv(a) => cmd_fracderiv(cli, a)?,
        Command::Project(a) => cmd_project(cli, a)?,
        Command::Lattice(a) => cmd_lattice(cli, a)?,
        Command::Atoms(a) => cmd_atoms(cli, a)?,
        Command::Verify(a) => return cmd_verify(cli, a),
        Command::Report(a) => cmd_report(cli, a)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
