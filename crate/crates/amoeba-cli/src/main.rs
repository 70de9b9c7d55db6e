//! Command-line driver for the curve pipeline.
//!
//! Every subcommand is a thin composition of library operations: inputs
//! are JSON files (polynomial or line-arrangement schema), outputs are
//! JSON result files plus SVG figures, and a `report.json` summarizing
//! the run — inputs, seeds, tolerances, outcome — is always written, with
//! no timestamps, so identical invocations produce identical bytes.
//!
//! Exit codes: 0 success; 2 mathematical refusal (the input is
//! well-formed but the object obstructs the computation, e.g. a
//! discriminantal curve fed to component counting); 1 input or I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use amoeba_core::{
    arrangement_nodes, construct_arrangement, extended_ll, is_discriminantal, ll_divisor,
    monodromy_b0, predicted_b0, render_amoeba, render_contour, scan_family, svg_string,
    BivariateLaurent, CoreError, FamilyParams, LineSpec, NodalCurve, Tolerances, Window,
};
use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "amoeba",
    version,
    about = "Logarithmic Gauss map pipeline: branching divisors, discriminant tests, \
             component counts, nodal arrangements, and amoeba/contour rendering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input JSON file (polynomial or arrangement, depending on the subcommand).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output directory for result files (created if missing).
    #[arg(long, global = true, default_value = "out")]
    output: PathBuf,
    /// Tolerance override, repeatable: --tol name=value.
    #[arg(long = "tol", value_name = "NAME=VALUE", global = true)]
    tol: Vec<String>,
    /// Direction steps (monodromy tracking grid / contour sweep directions).
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Grid resolution: amoeba columns and phases, or scan cells per axis.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Seed for randomized verification draws.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Window in the log plane: x_min,x_max,y_min,y_max.
    #[arg(long, global = true, value_name = "X0,X1,Y0,Y1")]
    window: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Branching divisor of the logarithmic Gauss map (critical values with multiplicity).
    Ll,
    /// Discriminant membership: does some branch value lie on RP1 within tolerance?
    Discriminant,
    /// Connected components of the critical set, counted by monodromy tracking.
    B0,
    /// Scan a one-parameter family: the coefficient of one monomial sweeps a complex grid.
    Scan {
        /// Monomial whose coefficient is the scan parameter, as "a,b" exponents.
        #[arg(long, value_name = "A,B", default_value = "1,1")]
        pencil_term: String,
        /// Also count components on non-discriminantal cells (slower).
        #[arg(long)]
        count: bool,
    },
    /// Extended branching divisor of a nodal line arrangement.
    NodalLl,
    /// Construct a line arrangement with verified node signs: n negative nodes among d lines.
    ConstructLines {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        /// Angle band of the line families (angles are drawn from (0, eps)).
        #[arg(long, default_value_t = 0.1)]
        family_eps: f64,
        /// Scale separation of the line families.
        #[arg(long, default_value_t = 10.0)]
        family_m: f64,
    },
    /// Render the amoeba and contour of a curve to SVG and JSON samples.
    Amoeba,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ll => "ll",
            Command::Discriminant => "discriminant",
            Command::B0 => "b0",
            Command::Scan { .. } => "scan",
            Command::NodalLl => "nodal-ll",
            Command::ConstructLines { .. } => "construct-lines",
            Command::Amoeba => "amoeba",
        }
    }
}

/// A run failure that still produces a report: either malformed
/// input/usage (exit 1) or a structured mathematical error (exit 1 or 2
/// per [`CoreError::is_refusal`]).
enum Failure {
    Usage(anyhow::Error),
    Math(CoreError),
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        Failure::Math(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

#[derive(Deserialize)]
struct TermJson {
    a: i64,
    b: i64,
    re: f64,
    im: f64,
}

#[derive(Deserialize)]
struct PolynomialJson {
    terms: Vec<TermJson>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = std::fs::create_dir_all(&cli.output) {
        eprintln!("error: cannot create output directory {}: {e}", cli.output.display());
        return ExitCode::from(1);
    }

    let mut report = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": cli.command.name(),
        "input": cli.input.as_ref().map(|p| p.display().to_string()),
        "output": cli.output.display().to_string(),
        "seed": cli.seed,
        "steps": cli.steps,
        "grid": cli.grid,
        "window": cli.window,
        "tol_overrides": cli.tol,
    });

    let outcome = apply_tolerances(&cli.tol)
        .map_err(Failure::Usage)
        .and_then(|tol| {
            report["tolerances"] = serde_json::to_value(&tol).unwrap_or(Value::Null);
            dispatch(&cli, &tol)
        });

    let code = match outcome {
        Ok((result, artifacts)) => {
            report["outcome"] = json!("ok");
            report["artifacts"] = json!(artifacts);
            if let Err(e) = write_json(&cli.output, "result.json", &result) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            println!("{}", summarize(&result));
            0u8
        }
        Err(fail) => {
            let (kind, message, code) = match &fail {
                Failure::Usage(e) => ("input".to_string(), format!("{e:#}"), 1u8),
                Failure::Math(e) => (
                    variant_name(e).to_string(),
                    e.to_string(),
                    if e.is_refusal() { 2 } else { 1 },
                ),
            };
            report["outcome"] = json!(if code == 2 { "refusal" } else { "error" });
            report["error"] = json!({ "kind": kind, "message": message });
            eprintln!("error: {message}");
            code
        }
    };
    if let Err(e) = write_json(&cli.output, "report.json", &report) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}

/// One-line stdout summary of the result payload.
fn summarize(result: &Value) -> String {
    if let Some(b0) = result.get("b0").and_then(Value::as_u64) {
        return format!("b0 = {b0}");
    }
    if let Some(d) = result.get("discriminantal").and_then(Value::as_bool) {
        return format!("discriminantal = {d}");
    }
    if let Some(div) = result.get("divisor") {
        if let Some(deg) = div.get("degree").and_then(Value::as_u64) {
            return format!("divisor of degree {deg}");
        }
    }
    if let Some(n) = result.get("samples").and_then(Value::as_u64) {
        return format!("{n} verified samples");
    }
    if let Some(cells) = result.get("cells").and_then(Value::as_array) {
        return format!("{} scan cells", cells.len());
    }
    if let Some(nm) = result.get("n_minus").and_then(Value::as_u64) {
        let np = result.get("n_plus").and_then(Value::as_u64).unwrap_or(0);
        return format!("arrangement with n_minus = {nm}, n_plus = {np}");
    }
    "done".to_string()
}

fn dispatch(cli: &Cli, tol: &Tolerances) -> Result<(Value, Vec<String>), Failure> {
    match &cli.command {
        Command::Ll => {
            let f = read_polynomial(cli)?;
            let divisor = ll_divisor(&f, tol)?;
            Ok((json!({ "divisor": divisor }), vec![]))
        }
        Command::Discriminant => {
            let f = read_polynomial(cli)?;
            let (member, margin) = is_discriminantal(&f, tol.projective_real, tol)?;
            Ok((
                json!({
                    "discriminantal": member,
                    "margin": if margin.is_finite() { Some(margin) } else { None },
                }),
                vec![],
            ))
        }
        Command::B0 => {
            let f = read_polynomial(cli)?;
            let res = monodromy_b0(&f, cli.steps.unwrap_or(0), tol.projective_real, tol)?;
            Ok((
                json!({
                    "b0": res.b0,
                    "permutation": res.permutation,
                    "min_separation": res.track.min_separation,
                }),
                vec![],
            ))
        }
        Command::Scan { pencil_term, count } => {
            let base = read_polynomial(cli)?;
            let (a, b) = parse_exponent_pair(pencil_term)?;
            let window = parse_window(cli)?.unwrap_or(Window::square(4.0));
            let n = cli.grid.unwrap_or(11).max(1);
            let mut alphas = Vec::with_capacity(n * n);
            for i in 0..n {
                let im = grid_value(window.y_min, window.y_max, i, n);
                for j in 0..n {
                    let re = grid_value(window.x_min, window.x_max, j, n);
                    alphas.push(Complex64::new(re, im));
                }
            }
            let template = |alpha: Complex64| {
                let mut terms: Vec<((i64, i64), Complex64)> = base
                    .terms()
                    .filter(|(k, _)| **k != (a, b))
                    .map(|(k, c)| (*k, *c))
                    .collect();
                terms.push(((a, b), alpha));
                BivariateLaurent::from_terms(terms)
            };
            let result = scan_family(
                template,
                &alphas,
                *count,
                cli.steps.unwrap_or(0),
                tol.projective_real,
                tol,
            );
            Ok((serde_json::to_value(&result).map_err(to_usage)?, vec![]))
        }
        Command::NodalLl => {
            let lines = read_arrangement(cli)?;
            let curve = NodalCurve::from_lines(&lines, tol)?;
            let divisor = extended_ll(&curve, tol)?;
            let (n_minus, n_plus) = curve.sign_counts();
            Ok((
                json!({
                    "divisor": divisor,
                    "nodes": curve.nodes,
                    "n_minus": n_minus,
                    "n_plus": n_plus,
                }),
                vec![],
            ))
        }
        Command::ConstructLines { d, n, family_eps, family_m } => {
            let params = FamilyParams { eps: *family_eps, m: *family_m };
            let lines = construct_arrangement(*d, *n, &params, cli.seed, tol)?;
            let nodes = arrangement_nodes(&lines, tol)?;
            let curve = NodalCurve::from_lines(&lines, tol)?;
            let predicted = predicted_b0(&curve, lines.len())?;
            let n_minus = nodes.iter().filter(|r| r.sigma == -1).count();
            let n_plus = nodes.iter().filter(|r| r.sigma == 1).count();
            write_json(&cli.output, "arrangement.json", &serde_json::to_value(&lines).map_err(to_usage)?)
                .map_err(to_usage_str)?;
            Ok((
                json!({
                    "d": d,
                    "requested_n": n,
                    "n_minus": n_minus,
                    "n_plus": n_plus,
                    "predicted_b0": predicted,
                    "nodes": nodes,
                }),
                vec!["arrangement.json".to_string()],
            ))
        }
        Command::Amoeba => {
            let f = read_polynomial(cli)?;
            let window = parse_window(cli)?.unwrap_or(Window::square(4.0));
            let grid = cli.grid.unwrap_or(121).max(1);
            let directions = cli.steps.unwrap_or(120).max(1);
            let mut img = render_amoeba(&f, &window, grid, grid, tol)?;
            let contour = render_contour(&f, directions, tol)?;
            img.absorb(contour);
            let svg = svg_string(&img);
            std::fs::write(cli.output.join("amoeba.svg"), &svg)
                .with_context(|| "writing amoeba.svg")
                .map_err(Failure::Usage)?;
            write_json(
                &cli.output,
                "samples.json",
                &serde_json::to_value(&img).map_err(to_usage)?,
            )
            .map_err(to_usage_str)?;
            let amoeba_count = img
                .samples
                .iter()
                .filter(|s| matches!(s.kind, amoeba_core::SampleKind::Amoeba))
                .count();
            Ok((
                json!({
                    "samples": img.samples.len(),
                    "amoeba_samples": amoeba_count,
                    "contour_samples": img.samples.len() - amoeba_count,
                    "skipped_directions": img.skipped.len(),
                    "rejected_samples": img.rejected_samples,
                }),
                vec!["amoeba.svg".to_string(), "samples.json".to_string()],
            ))
        }
    }
}

fn apply_tolerances(overrides: &[String]) -> anyhow::Result<Tolerances> {
    let mut tol = Tolerances::default();
    for entry in overrides {
        let (name, value) = entry
            .split_once('=')
            .ok_or_else(|| anyhow!("--tol expects name=value, got {entry:?}"))?;
        let value: f64 = value
            .parse()
            .with_context(|| format!("--tol {name}: value {value:?} is not a number"))?;
        if !tol.set(name, value) {
            bail!("--tol {name}: unknown tolerance name or non-positive value");
        }
    }
    Ok(tol)
}

fn input_path(cli: &Cli) -> Result<&Path, Failure> {
    cli.input
        .as_deref()
        .ok_or_else(|| Failure::Usage(anyhow!("this subcommand requires --input <file>")))
}

fn read_polynomial(cli: &Cli) -> Result<BivariateLaurent, Failure> {
    let path = input_path(cli)?;
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Usage)?;
    let parsed: PolynomialJson = serde_json::from_str(&text)
        .with_context(|| format!("parsing polynomial JSON {}", path.display()))
        .map_err(Failure::Usage)?;
    if parsed.terms.is_empty() {
        return Err(Failure::Usage(anyhow!("polynomial has no terms")));
    }
    Ok(BivariateLaurent::from_terms(
        parsed
            .terms
            .iter()
            .map(|t| ((t.a, t.b), Complex64::new(t.re, t.im))),
    ))
}

fn read_arrangement(cli: &Cli) -> Result<Vec<LineSpec>, Failure> {
    let path = input_path(cli)?;
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Usage)?;
    let lines: Vec<LineSpec> = serde_json::from_str(&text)
        .with_context(|| format!("parsing arrangement JSON {}", path.display()))
        .map_err(Failure::Usage)?;
    if lines.is_empty() {
        return Err(Failure::Usage(anyhow!("arrangement has no lines")));
    }
    Ok(lines)
}

fn parse_window(cli: &Cli) -> Result<Option<Window>, Failure> {
    let Some(spec) = &cli.window else { return Ok(None) };
    let parts: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("--window expects four numbers, got {spec:?}"))
        .map_err(Failure::Usage)?;
    if parts.len() != 4 {
        return Err(Failure::Usage(anyhow!(
            "--window expects x_min,x_max,y_min,y_max (four numbers, got {})",
            parts.len()
        )));
    }
    Ok(Some(Window::new(parts[0], parts[1], parts[2], parts[3])?))
}

fn parse_exponent_pair(s: &str) -> Result<(i64, i64), Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Failure::Usage(anyhow!(
            "--pencil-term expects two integers a,b, got {s:?}"
        )));
    }
    let a = parts[0]
        .parse()
        .with_context(|| format!("exponent {:?}", parts[0]))
        .map_err(Failure::Usage)?;
    let b = parts[1]
        .parse()
        .with_context(|| format!("exponent {:?}", parts[1]))
        .map_err(Failure::Usage)?;
    Ok((a, b))
}

/// Uniform grid over [lo, hi], endpoints included (midpoint for n = 1).
fn grid_value(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if n <= 1 {
        0.5 * (lo + hi)
    } else {
        lo + (hi - lo) * (i as f64) / ((n - 1) as f64)
    }
}

fn write_json(dir: &Path, name: &str, value: &Value) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    text.push('\n');
    std::fs::write(dir.join(name), text)
        .map_err(|e| format!("writing {}: {e}", dir.join(name).display()))
}

fn to_usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(anyhow!("{e}"))
}

fn to_usage_str(e: String) -> Failure {
    Failure::Usage(anyhow!("{e}"))
}

/// Stable machine-readable name of a core error variant.
fn variant_name(e: &CoreError) -> &'static str {
    match e {
        CoreError::EmptyPolynomial => "empty-polynomial",
        CoreError::DegeneratePolygon { .. } => "degenerate-polygon",
        CoreError::EvalAtTorusBoundary => "eval-at-torus-boundary",
        CoreError::NonConvergence { .. } => "non-convergence",
        CoreError::IdenticallyZeroResultant => "identically-zero-resultant",
        CoreError::GaussUndefined { .. } => "gauss-undefined",
        CoreError::DegreeMismatch { .. } => "degree-mismatch",
        CoreError::SingularCriticalLocus { .. } => "singular-critical-locus",
        CoreError::TrackingCollision { .. } => "tracking-collision",
        CoreError::EdgeDirectionCrossing { .. } => "edge-direction-crossing",
        CoreError::FiberNearBranch { .. } => "fiber-near-branch",
        CoreError::FiberEscape { .. } => "fiber-escape",
        CoreError::ParallelLines => "parallel-lines",
        CoreError::NodeOnTorusBoundary => "node-on-torus-boundary",
        CoreError::ZeroSignNode => "zero-sign-node",
        CoreError::NotNodal { .. } => "not-nodal",
        CoreError::SignVerificationFailed { .. } => "sign-verification-failed",
        CoreError::ArrangementOutOfRange { .. } => "arrangement-out-of-range",
        CoreError::InvalidInput(_) => "invalid-input",
        CoreError::Io(_) => "io",
    }
}
