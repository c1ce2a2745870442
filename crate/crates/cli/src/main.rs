//! `desing`: blow-up analysis of planar polynomial vector fields.
//!
//! Exit status: 0 on success, 1 when the pipeline rejects the input, 2 on
//! usage errors.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use desing::charts::ChartId;
use desing::dynamo::{sample_portrait, Frame, Grid, PlanarField, PolarNumField, PolyField};
use desing::error::DesingError;
use desing::polar::{desingularize_polar, polar_pushforward};
use desing::quasihom::{infer_weights, verify_weights, Weights};
use desing::report::{
    analyze, blowup, trajectories_csv, trajectories_json, trajectories_text, Model,
};
use desing::textfront::parse_field;
use desing::verify::{run_suite, DEFAULT_SEED};
use desing::{Bindings, VectorField};
use exactalg::{parse_rational, Rat};

#[derive(Parser)]
#[command(name = "desing", version, about = "Blow-up desingularization of planar polynomial vector fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the quasi-homogeneous weights (alpha, beta, k).
    Weights(Common),
    /// Print raw and desingularized blown-up fields.
    Blowup(Common),
    /// Locate and classify the equilibria on the exceptional divisor.
    Analyze(Common),
    /// Integrate orbits from a grid of seeds and write them out.
    Portrait(PortraitArgs),
    /// Run the randomized invariant suite.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Field description file; `-` or absent reads stdin.
    input: Option<PathBuf>,
    /// Parameter binding `name=value` (rational, `p/q` or decimal).
    #[arg(long = "param", value_parser = parse_binding)]
    params: Vec<(String, Rat)>,
    #[arg(long, value_enum, default_value_t = ModelArg::Directional)]
    model: ModelArg,
    /// Directional chart(s) to show; all four when absent.
    #[arg(long = "chart", value_parser = parse_chart)]
    charts: Vec<ChartId>,
    /// Weights `alpha,beta,k`, overriding inference.
    #[arg(long, value_parser = parse_weights)]
    weights: Option<Weights>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PortraitArgs {
    #[command(flatten)]
    common: Common,
    /// Seed grid `u0:u1:nu,v0:v1:nv`; chart coordinates are (radial, angular),
    /// polar ones (angle, radius).
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Option<Grid>,
    #[arg(long, default_value_t = 2.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// Integrate the original field instead of a blown-up one.
    #[arg(long)]
    original: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Seed for the random cases; DESING_SEED is used when absent.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Sphere,
    HyperbolicX,
    HyperbolicY,
    Directional,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Sphere => Model::Sphere,
            ModelArg::HyperbolicX => Model::HyperbolicX,
            ModelArg::HyperbolicY => Model::HyperbolicY,
            ModelArg::Directional => Model::Directional,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

fn parse_binding(s: &str) -> Result<(String, Rat), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v = parse_rational(value).map_err(|e| e.to_string())?;
    Ok((name.trim().to_string(), v))
}

fn parse_chart(s: &str) -> Result<ChartId, String> {
    ChartId::parse(s).ok_or_else(|| format!("unknown chart `{s}` (expected K1, K2, K3 or K4)"))
}

fn parse_weights(s: &str) -> Result<Weights, String> {
    let parts: Vec<u32> = s
        .split(',')
        .map(|p| p.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("weights `{s}`: {e}"))?;
    match parts[..] {
        [a, b, k] if a > 0 && b > 0 => Ok(Weights::new(a, b, k)),
        _ => Err(format!("weights `{s}` must be alpha,beta,k with alpha, beta > 0")),
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let axis = |t: &str| -> Result<(f64, f64, usize), String> {
        let p: Vec<&str> = t.split(':').collect();
        let [lo, hi, n] = p[..] else {
            return Err(format!("grid axis `{t}` must be lo:hi:n"));
        };
        let f = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("grid `{x}`: {e}"));
        let n = n.trim().parse::<usize>().map_err(|e| format!("grid `{n}`: {e}"))?;
        Ok((f(lo)?, f(hi)?, n))
    };
    let (u, v) = s
        .split_once(',')
        .ok_or_else(|| format!("grid `{s}` must be u0:u1:nu,v0:v1:nv"))?;
    let (u0, u1, nu) = axis(u)?;
    let (v0, v1, nv) = axis(v)?;
    Ok(Grid {
        u: (u0, u1),
        v: (v0, v1),
        nu,
        nv,
    })
}

enum Failure {
    Usage(String),
    Domain { stage: &'static str, message: String },
}

fn at(stage: &'static str) -> impl Fn(DesingError) -> Failure {
    move |e| Failure::Domain {
        stage,
        message: e.to_string(),
    }
}

fn io_failure(stage: &'static str) -> impl Fn(io::Error) -> Failure {
    move |e| Failure::Domain {
        stage,
        message: e.to_string(),
    }
}

fn read_input(input: &Option<PathBuf>) -> Result<String, Failure> {
    let mut s = String::new();
    match input {
        Some(p) if p.as_os_str() != "-" => {
            s = fs::read_to_string(p).map_err(|e| Failure::Domain {
                stage: "input",
                message: format!("{}: {e}", p.display()),
            })?;
        }
        _ => {
            io::stdin().read_to_string(&mut s).map_err(io_failure("input"))?;
        }
    }
    Ok(s)
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Domain {
            stage: "output",
            message: format!("{}: {e}", p.display()),
        }),
        None => io::stdout().write_all(text.as_bytes()).map_err(io_failure("output")),
    }
}

fn load(c: &Common) -> Result<VectorField, Failure> {
    parse_field(&read_input(&c.input)?).map_err(|e| at("parse")(e.into()))
}

/// Explicit weights after checking them, or inferred ones; an ambiguous
/// kernel resolves to its preferred solution with a note on stderr.
fn resolve_weights(f: &VectorField, explicit: Option<Weights>) -> Result<Weights, Failure> {
    if let Some(w) = explicit {
        if !verify_weights(f, &w) {
            return Err(at("weights")(DesingError::InvalidWeights(w.triple())));
        }
        return Ok(w);
    }
    match infer_weights(f) {
        Ok(w) => Ok(w),
        Err(DesingError::AmbiguousWeights {
            generators,
            preferred: Some(p),
        }) => {
            let w = Weights::new(p[0], p[1], p[2]);
            eprintln!("note: weights are not unique (generators {generators:?}); using {w}");
            Ok(w)
        }
        Err(e) => Err(at("weights")(e)),
    }
}

fn bindings(f: &VectorField, params: &[(String, Rat)]) -> Result<Bindings, Failure> {
    let mut m = BTreeMap::new();
    for (k, v) in params {
        if m.insert(k.clone(), v.clone()).is_some() {
            return Err(Failure::Usage(format!("parameter `{k}` bound twice")));
        }
    }
    f.bind(&m).map_err(at("bind"))
}

fn reject_format(format: Format, allowed: &[Format], cmd: &str) -> Result<(), Failure> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(Failure::Usage(format!("`{cmd}` does not support this --format")))
    }
}

fn cmd_weights(c: &Common) -> Result<(), Failure> {
    reject_format(c.format, &[Format::Text, Format::Json], "weights")?;
    let f = load(c)?;
    let w = resolve_weights(&f, c.weights)?;
    let text = match c.format {
        Format::Json => serde_json::to_string_pretty(&w).expect("weights serialize") + "\n",
        _ => format!("{w}\n"),
    };
    emit(&c.output, &text)
}

fn cmd_blowup(c: &Common) -> Result<(), Failure> {
    reject_format(c.format, &[Format::Text, Format::Json], "blowup")?;
    let f = load(c)?;
    let w = resolve_weights(&f, c.weights)?;
    let r = blowup(&f, &w, c.model.into(), &c.charts).map_err(at("blowup"))?;
    emit(&c.output, &if c.format == Format::Json { r.to_json() } else { r.to_text() })
}

fn cmd_analyze(c: &Common) -> Result<(), Failure> {
    reject_format(c.format, &[Format::Text, Format::Json], "analyze")?;
    let f = load(c)?;
    let w = resolve_weights(&f, c.weights)?;
    let b = bindings(&f, &c.params)?;
    let r = analyze(&f, &w, c.model.into(), &b).map_err(at("analyze"))?;
    emit(&c.output, &if c.format == Format::Json { r.to_json() } else { r.to_text() })
}

fn cmd_portrait(p: &PortraitArgs) -> Result<(), Failure> {
    let c = &p.common;
    if p.step.is_nan() || p.step <= 0.0 || p.t_end.is_nan() || p.t_end < 0.0 {
        return Err(Failure::Usage("--step must be positive and --t-end non-negative".into()));
    }
    let f = load(c)?;
    let b = bindings(&f, &c.params)?;
    let model: Model = c.model.into();
    let (field, frame, default_grid): (Box<dyn PlanarField>, Frame, Grid) = if p.original {
        let g = PolyField::original(&f, &b).map_err(at("portrait"))?;
        (Box::new(g), Frame::Original, grid((-1.0, 1.0), (-1.0, 1.0)))
    } else {
        let w = resolve_weights(&f, c.weights)?;
        match model.polar() {
            None => {
                let chart = match c.charts[..] {
                    [] => ChartId::K1,
                    [one] => one,
                    _ => return Err(Failure::Usage("portrait takes at most one --chart".into())),
                };
                let cf = desing::charts::blow_up_in_chart(&f, &w, chart).map_err(at("blowup"))?;
                let g = PolyField::chart_desing(&cf, &b).map_err(at("portrait"))?;
                (Box::new(g), Frame::Chart { chart }, grid((0.0, 1.0), (-1.0, 1.0)))
            }
            Some(pm) => {
                let pf = polar_pushforward(&f, pm)
                    .and_then(|x| desingularize_polar(&x))
                    .map_err(at("blowup"))?;
                let g = PolarNumField::new(&pf, &b).map_err(at("portrait"))?;
                let angles = match pm {
                    desing::polar::PolarModel::Sphere => (0.0, std::f64::consts::TAU),
                    _ => (-2.0, 2.0),
                };
                (Box::new(g), Frame::Polar { model: pm }, grid(angles, (0.0, 1.0)))
            }
        }
    };
    let g = p.grid.unwrap_or(default_grid);
    let trs = sample_portrait(field.as_ref(), frame, &g, p.t_end, p.step);
    let text = match c.format {
        Format::Csv => trajectories_csv(&trs),
        Format::Json => trajectories_json(&trs),
        Format::Text => trajectories_text(&trs),
    };
    emit(&c.output, &text)
}

fn grid(u: (f64, f64), v: (f64, f64)) -> Grid {
    Grid { u, v, nu: 5, nv: 5 }
}

fn cmd_verify(v: &VerifyArgs) -> Result<bool, Failure> {
    reject_format(v.format, &[Format::Text, Format::Json], "verify")?;
    let seed = match v.seed {
        Some(s) => s,
        None => match std::env::var("DESING_SEED") {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|e| Failure::Usage(format!("DESING_SEED `{s}`: {e}")))?,
            Err(_) => DEFAULT_SEED,
        },
    };
    let r = run_suite(seed);
    emit(&v.output, &if v.format == Format::Json { r.to_json() } else { r.to_text() })?;
    Ok(r.all_passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Weights(c) => cmd_weights(c).map(|_| true),
        Command::Blowup(c) => cmd_blowup(c).map(|_| true),
        Command::Analyze(c) => cmd_analyze(c).map(|_| true),
        Command::Portrait(p) => cmd_portrait(p).map(|_| true),
        Command::Verify(v) => cmd_verify(v),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Domain { stage, message }) => {
            eprintln!("error [{stage}]: {message}");
            ExitCode::from(1)
        }
    }
}
