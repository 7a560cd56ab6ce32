//! `monge`: verify scenario files, generate corpora, run sweeps and draw
//! figures.
//!
//! Exit codes: 0 when the verdict matches the expectation (or is true with
//! none), 1 on a mismatch, 2 on invalid input. The default tolerance can be
//! overridden with `MONGE_TOLERANCE`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use monge_core::figure::render_figure;
use monge_core::generators::{GenKind, GenSpec, Space};
use monge_core::scenario::{error_json, generate_scenario, verify, ScenarioFile};
use monge_core::{Error, Tolerance};

const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "monge", version, about = "Monge hyperplanes and Menelaus conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check one scenario file and write its report.
    Verify(VerifyArgs),
    /// Write seeded scenario files.
    Generate(GenerateArgs),
    /// Generate and check positive and negative cases per dimension.
    Sweep(SweepArgs),
    /// Draw a planar shape scenario as SVG.
    Figure(FigureArgs),
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Use rational arithmetic (Euclidean scenarios only).
    #[arg(long)]
    exact: bool,
    /// Report path; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GeometryArg {
    Euclidean,
    Spherical,
    Hyperbolic,
}

impl From<GeometryArg> for Space {
    fn from(g: GeometryArg) -> Self {
        match g {
            GeometryArg::Euclidean => Space::Euclidean,
            GeometryArg::Spherical => Space::Spherical,
            GeometryArg::Hyperbolic => Space::Hyperbolic,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum KindArg {
    Balls,
    #[value(name = "vertex_sets", alias = "vertex-sets")]
    VertexSets,
    #[value(name = "edge_points", alias = "edge-points")]
    EdgePoints,
}

impl From<KindArg> for GenKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Balls => GenKind::Balls,
            KindArg::VertexSets => GenKind::VertexSets,
            KindArg::EdgePoints => GenKind::EdgePoints,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum, default_value = "euclidean")]
    geometry: GeometryArg,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, value_enum, default_value = "edge_points")]
    kind: KindArg,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.5)]
    ratio_gap: f64,
    /// Write negative cases with this relative perturbation.
    #[arg(long)]
    perturb: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value = "euclidean")]
    geometry: GeometryArg,
    /// Inclusive range such as `2..6`, or a single dimension.
    #[arg(long, default_value = "2..4")]
    dims: String,
    #[arg(long, default_value_t = 100)]
    per_cell: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, value_enum, default_value = "edge_points")]
    kind: KindArg,
    #[arg(long, default_value_t = 1.5)]
    ratio_gap: f64,
    #[arg(long, default_value_t = 1e-2)]
    perturb: f64,
}

#[derive(Args)]
struct FigureArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Debug)]
enum Failure {
    Input(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn tolerance(flag: Option<f64>) -> Result<Tolerance, Failure> {
    let t = match flag {
        Some(t) => t,
        None => match std::env::var("MONGE_TOLERANCE") {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::InvalidLiteral(format!("MONGE_TOLERANCE={s}")))?,
            Err(_) => DEFAULT_TOLERANCE,
        },
    };
    let tol = Tolerance::new(t, t);
    tol.validate()?;
    Ok(tol)
}

/// Writes through a temporary file in the same directory so readers never
/// see a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| Failure::Io(e.to_string()))?;
    Ok(())
}

fn read_scenario(path: &Path) -> Result<ScenarioFile, Failure> {
    let text = fs::read_to_string(path)?;
    Ok(ScenarioFile::parse(&text)?)
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode, Failure> {
    let tol = tolerance(args.tolerance)?;
    let file = read_scenario(&args.input)?;
    let outcome = verify(&file, tol, args.exact)?;
    let text = serde_json::to_string_pretty(&outcome.report).expect("report serializes") + "\n";
    match &args.output {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(if outcome.as_expected() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_generate(args: &GenerateArgs) -> Result<ExitCode, Failure> {
    let spec = GenSpec {
        geometry: args.geometry.into(),
        dim: args.dim,
        count: args.count,
        seed: args.seed,
        kind: args.kind.into(),
        ratio_gap: args.ratio_gap,
        perturb: args.perturb,
    };
    spec.validate()?;
    let files = (0..spec.count)
        .into_par_iter()
        .map(|k| generate_scenario(&spec, k).map(|f| (k, f)))
        .collect::<Result<Vec<_>, _>>()?;
    fs::create_dir_all(&args.out)?;
    for (k, file) in files {
        let path = args.out.join(format!("scenario-{}-{}.json", spec.seed, k));
        write_atomic(&path, file.to_pretty_json().as_bytes())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_dims(s: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Input(Error::InvalidSpec(format!("bad dimension range `{s}`")));
    let s = s.trim();
    let (lo, hi) = if let Some((a, b)) = s.split_once("..=").or_else(|| s.split_once("..")) {
        (a, b)
    } else if let Some((a, b)) = s.split_once('-') {
        (a, b)
    } else {
        (s, s)
    };
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

struct Case {
    dim: usize,
    positive: bool,
    passed: bool,
    residual: f64,
    error: Option<String>,
}

fn run_case(spec: &GenSpec, case: usize, positive: bool, tol: Tolerance) -> Case {
    let spec = GenSpec {
        perturb: if positive { None } else { spec.perturb },
        ..spec.clone()
    };
    let result = generate_scenario(&spec, case).and_then(|f| verify(&f, tol, false));
    match result {
        Ok(o) => Case {
            dim: spec.dim,
            positive,
            passed: o.verdict == positive,
            residual: o.triple_residual.unwrap_or(0.0).max(o.hyperplane_residual),
            error: None,
        },
        Err(e) => Case {
            dim: spec.dim,
            positive,
            passed: false,
            residual: f64::NAN,
            error: Some(format!("dim {} case {case}: {e}", spec.dim)),
        },
    }
}

fn cmd_sweep(args: &SweepArgs) -> Result<ExitCode, Failure> {
    let tol = tolerance(args.tolerance)?;
    let dims = parse_dims(&args.dims)?;
    let negatives = args.kind == KindArg::EdgePoints;
    let mut jobs = Vec::new();
    for &dim in &dims {
        let spec = GenSpec {
            geometry: args.geometry.into(),
            dim,
            count: args.per_cell,
            seed: args.seed,
            kind: args.kind.into(),
            ratio_gap: args.ratio_gap,
            perturb: Some(args.perturb),
        };
        spec.validate()?;
        for k in 0..args.per_cell {
            jobs.push((spec.clone(), k, true));
            if negatives {
                jobs.push((spec.clone(), k, false));
            }
        }
    }
    let cases: Vec<Case> = jobs.par_iter().map(|(s, k, p)| run_case(s, *k, *p, tol)).collect();
    println!(
        "{:<10} {:>4} {:>10} {:>10} {:>14} {:>14}",
        "geometry", "dim", "positive", "negative", "max_pos_resid", "min_neg_resid"
    );
    let mut clean = true;
    let name = Space::from(args.geometry).name();
    for &dim in &dims {
        if args.per_cell == 0 {
            break;
        }
        let cell: Vec<&Case> = cases.iter().filter(|c| c.dim == dim).collect();
        let pos: Vec<&&Case> = cell.iter().filter(|c| c.positive).collect();
        let neg: Vec<&&Case> = cell.iter().filter(|c| !c.positive).collect();
        let pos_ok = pos.iter().filter(|c| c.passed).count();
        let neg_ok = neg.iter().filter(|c| c.passed).count();
        let max_pos = pos.iter().map(|c| c.residual).fold(0.0, f64::max);
        let min_neg = neg.iter().map(|c| c.residual).fold(f64::INFINITY, f64::min);
        clean &= pos_ok == pos.len() && neg_ok == neg.len();
        println!(
            "{:<10} {:>4} {:>10} {:>10} {:>14.3e} {:>14}",
            name,
            dim,
            format!("{pos_ok}/{}", pos.len()),
            format!("{neg_ok}/{}", neg.len()),
            max_pos,
            if neg.is_empty() {
                "-".to_string()
            } else {
                format!("{min_neg:.3e}")
            }
        );
        for c in cell.iter().filter_map(|c| c.error.as_ref()) {
            eprintln!("{c}");
        }
    }
    Ok(if clean { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_figure(args: &FigureArgs) -> Result<ExitCode, Failure> {
    let tol = tolerance(args.tolerance)?;
    let file = read_scenario(&args.input)?;
    let svg = render_figure(&file, tol)?;
    write_atomic(&args.output, svg.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Figure(a) => cmd_figure(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let obj = match f {
                Failure::Input(e) => error_json(&e),
                Failure::Io(msg) => serde_json::json!({ "error": "Io", "message": msg }),
            };
            eprintln!("{obj}");
            ExitCode::from(2)
        }
    }
}
