//! Command-line front end for the dimensional calculus: dimension checks
//! on unit-annotated expressions, Pi-group reports, law reduction with
//! sampled invariance verification, gravitational simulation, and
//! similarity-transform experiments on recorded traces.
//!
//! Exit codes: 0 success/consistent, 1 semantic failure (inconsistent
//! dimensions, invariance violated, verdict FAIL), 2 input error.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use dimensional::expr::{self, CheckContext, Expr, ExprError, ExprKind, ReportLine};
use dimensional::gravsim::{
    integrate, measure_gamma, read_trace, residual, time_reflect, transform_report, write_trace,
    BodyState, DilationLTM, GravSystem, IntegrateOptions, Trajectory, TransformMode,
};
use dimensional::pi::{kernel_basis, DimMatrix, ReduceOptions, TheorySpec};
use dimensional::{Dimension, DimensionSystem, Quantity, UnitFrame, Vec3Q};

const EXIT_SEMANTIC: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "dimcli", version, about = "Dimensional calculus toolkit")]
struct Cli {
    /// Emit machine-readable JSON instead of text reports.
    #[arg(long, global = true)]
    json: bool,
    /// Tolerance override for sampled or residual-based verdicts.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// RNG seed for sampled invariance verification.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dimension-check an expression or a law `lhs = rhs`.
    Check {
        /// Expression or law text, e.g. `omega = sqrt(g/ell)`.
        input: String,
        /// Theory file declaring fundamentals and derived quantities.
        #[arg(long)]
        theory: Option<PathBuf>,
    },
    /// Print the Pi-group of a theory: K, R and the kernel monomials.
    Pi {
        theory: PathBuf,
    },
    /// Reduce a law file to dimensionless form and verify dilation
    /// invariance by sampling.
    Reduce {
        law_file: PathBuf,
    },
    /// Integrate an N-body configuration and write a trace.
    Simulate {
        config: PathBuf,
        /// Output prefix; writes `<out>.csv` and `<out>.meta.json`.
        #[arg(long, default_value = "trace")]
        out: PathBuf,
    },
    /// Apply a dilation to a trace under one of the three readings.
    Scale {
        /// Trace CSV path; the metadata sidecar is derived from it.
        trace: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, value_enum, default_value_t = Mode::Active)]
        mode: Mode,
        /// Output prefix for the transformed trace or report.
        #[arg(long, default_value = "scaled")]
        out: PathBuf,
    },
    /// Fit Gamma back out of a recorded trace.
    MeasureGamma {
        trace: PathBuf,
    },
    /// Time-reverse a trace and write the result.
    Reflect {
        trace: PathBuf,
        #[arg(long, default_value = "reflected")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Leibniz,
    Active,
    Passive,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    };
    out
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.cmd {
        Cmd::Check { input, theory } => cmd_check(cli, input, theory.as_deref()),
        Cmd::Pi { theory } => cmd_pi(cli, theory),
        Cmd::Reduce { law_file } => cmd_reduce(cli, law_file),
        Cmd::Simulate { config, out } => cmd_simulate(cli, config, out),
        Cmd::Scale {
            trace,
            lambda,
            tau,
            mu,
            mode,
            out,
        } => cmd_scale(cli, trace, *lambda, *tau, *mu, *mode, out),
        Cmd::MeasureGamma { trace } => cmd_measure_gamma(cli, trace),
        Cmd::Reflect { trace, out } => cmd_reflect(cli, trace, out),
    }
}

// ---------------------------------------------------------------- check

/// Checking context from a theory file, or the default mechanical frame
/// (L, T, M as m, s, kg) when no theory is given.
fn load_context(theory: Option<&Path>) -> Result<CheckContext> {
    match theory {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let spec: TheorySpec = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            let system = DimensionSystem::new(spec.fundamentals.clone())?;
            let units = spec
                .units
                .clone()
                .unwrap_or_else(|| spec.fundamentals.clone());
            let frame = UnitFrame::new(&system, units)?;
            let mut vars = HashMap::new();
            for d in &spec.derived {
                let exps: Vec<i64> = d.exp.clone();
                vars.insert(
                    d.name.clone(),
                    Dimension::from_int_exponents(&system, &exps)?,
                );
            }
            Ok(CheckContext { frame, vars })
        }
        None => {
            let system = DimensionSystem::new(vec!["L", "T", "M"])?;
            let frame = UnitFrame::new(&system, vec!["m", "s", "kg"])?;
            Ok(CheckContext {
                frame,
                vars: HashMap::new(),
            })
        }
    }
}

fn report_json(report: &[ReportLine]) -> serde_json::Value {
    json!(report
        .iter()
        .map(|l| json!({"expr": l.rendered, "dim": l.dim.to_string()}))
        .collect::<Vec<_>>())
}

fn cmd_check(cli: &Cli, input: &str, theory: Option<&Path>) -> Result<ExitCode> {
    let ctx = load_context(theory)?;
    let units: Vec<String> = ctx.frame.unit_names().to_vec();

    let is_law = input.contains('=');
    let parsed: Result<_, ExprError> = if is_law {
        expr::parse_law(input, &units).map(|(l, r)| (l, Some(r)))
    } else {
        expr::parse_quantity_expr(input, &units).map(|e| (e, None))
    };
    let (lhs, rhs) = match parsed {
        Ok(p) => p,
        Err(e) => {
            if cli.json {
                println!("{}", json!({"consistent": false, "error": e.to_string()}));
            } else {
                eprintln!("{e}");
            }
            return Ok(ExitCode::from(EXIT_INPUT));
        }
    };

    let mut report = Vec::new();
    let outcome = (|| -> Result<Dimension, ExprError> {
        let dl = expr::check_dim(&lhs, &ctx, &mut report)?;
        if let Some(rhs) = &rhs {
            let dr = expr::check_dim(rhs, &ctx, &mut report)?;
            if dl != dr {
                return Err(ExprError::Check {
                    line: 1,
                    col: 1,
                    msg: format!("dimension mismatch at =: {dl} vs {dr}"),
                });
            }
        }
        Ok(dl)
    })();

    match outcome {
        Ok(dim) => {
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "consistent": true,
                        "dimension": dim.to_string(),
                        "subterms": report_json(&report),
                    })
                );
            } else {
                for line in &report {
                    println!("  {}  :  {}", line.rendered, line.dim);
                }
                println!("consistent: {dim}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "consistent": false,
                        "error": e.to_string(),
                        "subterms": report_json(&report),
                    })
                );
            } else {
                for line in &report {
                    println!("  {}  :  {}", line.rendered, line.dim);
                }
                eprintln!("{e}");
            }
            Ok(ExitCode::from(EXIT_SEMANTIC))
        }
    }
}

// ------------------------------------------------------------------- pi

fn cmd_pi(cli: &Cli, theory: &Path) -> Result<ExitCode> {
    let text =
        std::fs::read_to_string(theory).with_context(|| format!("reading {}", theory.display()))?;
    let matrix = DimMatrix::from_json(&text)?;
    let basis = kernel_basis(&matrix);
    let monomials: Vec<String> = (0..basis.count())
        .map(|k| basis.render_monomial(k, matrix.derived_names()))
        .collect();

    if cli.json {
        println!(
            "{}",
            json!({
                "k": basis.count(),
                "rank": basis.rank(),
                "kernel": basis
                    .vectors()
                    .iter()
                    .map(|v| v.iter().map(|e| e.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "pi": monomials,
            })
        );
    } else {
        println!("K = {}, R = {}", basis.count(), basis.rank());
        if basis.count() == 0 {
            println!("no dimensionless combinations");
        }
        for (k, m) in monomials.iter().enumerate() {
            let vec: Vec<String> = basis.vectors()[k].iter().map(|e| e.to_string()).collect();
            println!("Pi_{} = {}   [{}]", k + 1, m, vec.join(", "));
        }
    }
    Ok(ExitCode::SUCCESS)
}

// --------------------------------------------------------------- reduce

#[derive(Deserialize)]
struct LawFile {
    theory: TheorySpec,
    /// Equation `lhs = rhs` over the declared derived quantities.
    law: String,
}

/// Magnitude-only evaluation. Only called after the homogeneity check, so
/// dimension errors cannot occur.
fn eval_magnitude(e: &Expr, values: &HashMap<String, f64>) -> f64 {
    match &e.kind {
        ExprKind::Literal { value, .. } => *value,
        ExprKind::Var(name) => values[name],
        ExprKind::Add(a, b) => eval_magnitude(a, values) + eval_magnitude(b, values),
        ExprKind::Sub(a, b) => eval_magnitude(a, values) - eval_magnitude(b, values),
        ExprKind::Mul(a, b) => eval_magnitude(a, values) * eval_magnitude(b, values),
        ExprKind::Div(a, b) => eval_magnitude(a, values) / eval_magnitude(b, values),
        ExprKind::Pow(a, q) => {
            let base = eval_magnitude(a, values);
            let exp = q.numer().to_string().parse::<f64>().unwrap()
                / q.denom().to_string().parse::<f64>().unwrap();
            base.powf(exp)
        }
        ExprKind::Sqrt(a) => eval_magnitude(a, values).sqrt(),
        ExprKind::Neg(a) => -eval_magnitude(a, values),
    }
}

fn cmd_reduce(cli: &Cli, law_file: &Path) -> Result<ExitCode> {
    let text = std::fs::read_to_string(law_file)
        .with_context(|| format!("reading {}", law_file.display()))?;
    let file: LawFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", law_file.display()))?;
    let matrix = DimMatrix::from_spec(&file.theory)?;
    let basis = kernel_basis(&matrix);

    let system: Arc<DimensionSystem> = matrix.system().clone();
    let units = file
        .theory
        .units
        .clone()
        .unwrap_or_else(|| file.theory.fundamentals.clone());
    let frame = UnitFrame::new(&system, units)?;
    let mut vars = HashMap::new();
    for (l, name) in matrix.derived_names().iter().enumerate() {
        vars.insert(name.clone(), matrix.column_dimension(l));
    }
    let ctx = CheckContext { frame, vars };
    let unit_names: Vec<String> = ctx.frame.unit_names().to_vec();

    let (lhs, rhs) = match expr::parse_law(&file.law, &unit_names) {
        Ok(p) => p,
        Err(e) => bail!("law: {e}"),
    };
    for ident in idents(&lhs).into_iter().chain(idents(&rhs)) {
        if !ctx.vars.contains_key(&ident) {
            bail!("law references `{ident}`, which is not a declared derived quantity");
        }
    }
    let mut report = Vec::new();
    let dl = expr::check_dim(&lhs, &ctx, &mut report).map_err(|e| anyhow!("law: {e}"))?;
    let dr = expr::check_dim(&rhs, &ctx, &mut report).map_err(|e| anyhow!("law: {e}"))?;
    if dl != dr {
        eprintln!("law is not dimensionally homogeneous: {dl} vs {dr}");
        return Ok(ExitCode::from(EXIT_SEMANTIC));
    }

    let names: Vec<String> = matrix.derived_names().to_vec();
    let law = |values: &[f64]| -> f64 {
        let bound: HashMap<String, f64> = names
            .iter()
            .cloned()
            .zip(values.iter().copied())
            .collect();
        eval_magnitude(&lhs, &bound) - eval_magnitude(&rhs, &bound)
    };

    let mut opts = ReduceOptions::default();
    if let Some(seed) = cli.seed {
        opts.seed = seed;
    }
    if let Some(tol) = cli.tol {
        opts.tol = tol;
    }
    let reduced = dimensional::pi::reduce_law(&matrix, &basis, law, &opts)?;
    let invariant = reduced.report.violations == 0;

    let monomials: Vec<String> = (0..basis.count())
        .map(|k| basis.render_monomial(k, matrix.derived_names()))
        .collect();
    if cli.json {
        println!(
            "{}",
            json!({
                "k": basis.count(),
                "rank": basis.rank(),
                "pi": monomials,
                "samples": reduced.report.samples,
                "violations": reduced.report.violations,
                "invariant": invariant,
                "note": reduced.report.note,
            })
        );
    } else {
        println!("K = {}, R = {}", basis.count(), basis.rank());
        for (k, m) in monomials.iter().enumerate() {
            println!("Pi_{} = {}", k + 1, m);
        }
        println!(
            "invariance: {}/{} samples violated ({})",
            reduced.report.violations, reduced.report.samples, reduced.report.note
        );
    }
    Ok(if invariant {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_SEMANTIC)
    })
}

fn idents(e: &Expr) -> Vec<String> {
    match &e.kind {
        ExprKind::Literal { .. } => Vec::new(),
        ExprKind::Var(name) => vec![name.clone()],
        ExprKind::Add(a, b)
        | ExprKind::Sub(a, b)
        | ExprKind::Mul(a, b)
        | ExprKind::Div(a, b) => {
            let mut v = idents(a);
            v.extend(idents(b));
            v
        }
        ExprKind::Pow(a, _) | ExprKind::Sqrt(a) | ExprKind::Neg(a) => idents(a),
    }
}

// ------------------------------------------------------------- simulate

#[derive(Deserialize)]
struct SimBody {
    /// Quantity expression, e.g. `1e10 kg`.
    mass: String,
    /// Numerals in frame length units.
    position: [f64; 3],
    /// Numerals in frame velocity units.
    velocity: [f64; 3],
}

#[derive(Deserialize)]
struct SimConfig {
    fundamentals: Vec<String>,
    units: Vec<String>,
    /// Quantity expression, e.g. `6.67430e-11 m^3 s^-2 kg^-1`.
    gamma: String,
    bodies: Vec<SimBody>,
    t_start: String,
    t_end: String,
    #[serde(default)]
    rel_tol: Option<f64>,
    #[serde(default)]
    abs_tol: Option<f64>,
    #[serde(default)]
    output_points: Option<usize>,
    #[serde(default)]
    min_distance: Option<f64>,
}

/// Evaluate a closed quantity expression (no free identifiers).
fn parse_quantity(text: &str, ctx: &CheckContext) -> Result<Quantity> {
    let units: Vec<String> = ctx.frame.unit_names().to_vec();
    let e = expr::parse_quantity_expr(text, &units).map_err(|e| anyhow!("`{text}`: {e}"))?;
    expr::eval(&e, ctx, &HashMap::new()).map_err(|e| anyhow!("`{text}`: {e}"))
}

fn cmd_simulate(cli: &Cli, config: &Path, out: &Path) -> Result<ExitCode> {
    let text =
        std::fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let cfg: SimConfig = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", config.display()))?;

    let system = DimensionSystem::new(cfg.fundamentals.clone())?;
    let frame = UnitFrame::new(&system, cfg.units.clone())?;
    let ctx = CheckContext {
        frame: frame.clone(),
        vars: HashMap::new(),
    };

    let gamma = parse_quantity(&cfg.gamma, &ctx).context("gamma")?;
    let masses: Vec<Quantity> = cfg
        .bodies
        .iter()
        .map(|b| parse_quantity(&b.mass, &ctx).context("mass"))
        .collect::<Result<_>>()?;
    let grav = GravSystem::new(&frame, masses, gamma)?;

    for i in 0..cfg.bodies.len() {
        for j in i + 1..cfg.bodies.len() {
            if cfg.bodies[i].position == cfg.bodies[j].position {
                bail!("bodies {} and {} have coincident positions", i + 1, j + 1);
            }
        }
    }
    let init: Vec<BodyState> = cfg
        .bodies
        .iter()
        .map(|b| {
            BodyState::new(
                &grav,
                Vec3Q::new(b.position, grav.length_dim(), &frame)?,
                Vec3Q::new(b.velocity, grav.velocity_dim(), &frame)?,
            )
            .map_err(anyhow::Error::from)
        })
        .collect::<Result<_>>()?;

    let t0 = parse_quantity(&cfg.t_start, &ctx).context("t_start")?;
    let t1 = parse_quantity(&cfg.t_end, &ctx).context("t_end")?;
    let defaults = IntegrateOptions::default();
    let opts = IntegrateOptions {
        rel_tol: cfg.rel_tol.unwrap_or(defaults.rel_tol),
        abs_tol: cfg.abs_tol.unwrap_or(defaults.abs_tol),
        min_distance: cfg.min_distance,
        output_points: cfg.output_points.unwrap_or(defaults.output_points),
        max_steps: defaults.max_steps,
    };

    let traj = integrate(&grav, &init, &t0, &t1, &opts)?;
    let (csv, meta) = trace_paths(out);
    write_trace(&traj, &csv, &meta)?;
    let r = residual(&traj)?;

    if cli.json {
        println!(
            "{}",
            json!({
                "termination": format!("{:?}", traj.termination),
                "samples": traj.len(),
                "residual": r.magnitude(),
                "residual_rendered": r.render(),
                "csv": csv.display().to_string(),
                "meta": meta.display().to_string(),
            })
        );
    } else {
        println!("termination: {:?}", traj.termination);
        println!("samples: {}", traj.len());
        println!("max residual: {}", r.render());
        println!("wrote {} and {}", csv.display(), meta.display());
    }
    Ok(ExitCode::SUCCESS)
}

/// `<out>.csv` and `<out>.meta.json` from a prefix, or the pair derived
/// from an explicit `.csv` path.
fn trace_paths(p: &Path) -> (PathBuf, PathBuf) {
    let prefix = if p.extension().is_some_and(|e| e == "csv") {
        p.with_extension("")
    } else {
        p.to_path_buf()
    };
    let mut csv = prefix.clone().into_os_string();
    csv.push(".csv");
    let mut meta = prefix.into_os_string();
    meta.push(".meta.json");
    (PathBuf::from(csv), PathBuf::from(meta))
}

fn load_trace(trace: &Path) -> Result<Trajectory> {
    let (csv, meta) = trace_paths(trace);
    read_trace(&csv, &meta).with_context(|| format!("reading trace {}", csv.display()))
}

// ---------------------------------------------------------------- scale

fn cmd_scale(
    cli: &Cli,
    trace: &Path,
    lambda: f64,
    tau: f64,
    mu: f64,
    mode: Mode,
    out: &Path,
) -> Result<ExitCode> {
    let traj = load_trace(trace)?;
    let d = DilationLTM::new(lambda, tau, mu)?;
    let constraint = d.constraint_value();
    // residual-growth factor separating PASS from FAIL
    let factor_tol = cli.tol.unwrap_or(10.0);

    match mode {
        Mode::Leibniz | Mode::Passive => {
            let tmode = if mode == Mode::Leibniz {
                TransformMode::Leibniz
            } else {
                TransformMode::Passive
            };
            let report = transform_report(&traj, &d, tmode)?;
            let mut path = out.to_path_buf().into_os_string();
            path.push(".report.json");
            let path = PathBuf::from(path);
            std::fs::write(&path, serde_json::to_string_pretty(&report)?)?;
            let why = if mode == Mode::Leibniz {
                "isomorphism, not automorphism: numerals identical"
            } else {
                "unit change: physical values fixed"
            };
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "mode": format!("{tmode:?}").to_lowercase(),
                        "constraint": constraint,
                        "verdict": "N/A",
                        "reason": why,
                        "report": path.display().to_string(),
                    })
                );
            } else {
                println!("constraint lambda^3 tau^-2 mu^-1 = {constraint}");
                println!("verdict: N/A ({why})");
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Mode::Active => {
            let base = residual(&traj)?.magnitude();
            let scaled = traj.similarity_transform(&d);
            let after = residual(&scaled)?.magnitude();
            let (csv, meta) = trace_paths(out);
            write_trace(&scaled, &csv, &meta)?;
            let factor = if base > 0.0 { after / base } else { f64::INFINITY };
            let pass = d.is_similarity() && factor <= factor_tol;
            let verdict = if pass { "PASS" } else { "FAIL" };
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "mode": "active",
                        "constraint": constraint,
                        "is_similarity": d.is_similarity(),
                        "residual_before": base,
                        "residual_after": after,
                        "residual_factor": factor,
                        "verdict": verdict,
                        "csv": csv.display().to_string(),
                    })
                );
            } else {
                println!("constraint lambda^3 tau^-2 mu^-1 = {constraint}");
                println!("residual: {base:e} -> {after:e} (factor {factor:.3})");
                println!("verdict: {verdict}");
                println!("wrote {} and {}", csv.display(), meta.display());
            }
            Ok(if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_SEMANTIC)
            })
        }
    }
}

// -------------------------------------------------- measure-gamma, reflect

fn cmd_measure_gamma(cli: &Cli, trace: &Path) -> Result<ExitCode> {
    let traj = load_trace(trace)?;
    let fit = measure_gamma(&traj)?;
    if cli.json {
        println!(
            "{}",
            json!({
                "gamma": fit.gamma.magnitude(),
                "gamma_rendered": fit.gamma.render(),
                "relative_rms": fit.relative_rms,
                "points": fit.points,
            })
        );
    } else {
        println!("Gamma = {}", fit.gamma.render());
        println!("relative rms = {:e} over {} points", fit.relative_rms, fit.points);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_reflect(cli: &Cli, trace: &Path, out: &Path) -> Result<ExitCode> {
    let traj = load_trace(trace)?;
    let refl = time_reflect(&traj);
    let (csv, meta) = trace_paths(out);
    write_trace(&refl, &csv, &meta)?;
    let before = residual(&traj)?.magnitude();
    let after = residual(&refl)?.magnitude();
    if cli.json {
        println!(
            "{}",
            json!({
                "residual_before": before,
                "residual_after": after,
                "csv": csv.display().to_string(),
            })
        );
    } else {
        println!("residual: {before:e} -> {after:e}");
        println!("wrote {} and {}", csv.display(), meta.display());
    }
    Ok(ExitCode::SUCCESS)
}
