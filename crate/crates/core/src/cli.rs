//! Command-line front end: argument parsing, artifact emission and exit codes.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classical::{self, QuadSpec};
use crate::conformal::univalence_check;
use crate::error::QuadError;
use crate::lqd::{self, LqdProblem};
use crate::maps::{MapKind, MapSpec};
use crate::numcheck::{default_nodes, default_tests, verify_with_expansion, ResidualReport};
use crate::pqd::{self, PqdProblem};
use crate::ratfun::RationalFn;
use crate::schwarzdyn::{self, EscapeGrid, Region};
use crate::solver::{InverseSolution, Normalization};

/// Verification threshold on the largest relative residual.
pub const VERIFY_TOL: f64 = 1e-7;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Solver(String),
    #[error("verification failed: maxRel = {0:e}")]
    Verify(f64),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::Verify(_) => EXIT_VERIFY,
        }
    }
}

impl From<QuadError> for CliError {
    fn from(e: QuadError) -> Self {
        match e {
            QuadError::NoConvergence { .. }
            | QuadError::NewtonDivergence(_)
            | QuadError::NoRoot(_)
            | QuadError::MissingSolution(_)
            | QuadError::EmptyAfterFilter
            | QuadError::NonUnivalentSolution(_) => CliError::Solver(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "quadlab", version, about = "Quadrature domains: solve, classify, verify, render")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Svg,
    Csv,
    Png,
    Ppm,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; JSON goes to standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; inferred from the file extension when absent.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Boundary samples for verification and curve output.
    #[arg(long)]
    pub nodes: Option<usize>,
}

#[derive(Debug, Args)]
pub struct InverseArgs {
    /// Quadrature function as RationalFn JSON, inline or a file path.
    #[arg(long)]
    pub h: String,
    /// Bounded normalization `φ(0) = w₀`.
    #[arg(long, allow_hyphen_values = true)]
    pub w0: Option<String>,
    /// Unbounded normalization: conformal radius.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub contains_zero: bool,
    #[arg(long)]
    pub no_verify: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quadrature function of a Riemann map.
    SolveDirect {
        /// MapSpec JSON, inline or a file path.
        #[arg(long)]
        map: String,
        #[arg(long)]
        no_verify: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Riemann map of a domain with a given quadrature function.
    SolveInverse {
        /// Weight parameter: 1 classical, > 0 power, 0 log.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[command(flatten)]
        inv: InverseArgs,
    },
    /// Existence and critical parameters for `h = α/(w − w₀)`.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        w0: String,
    },
    /// Parameter sweep of a one-parameter family.
    Sweep(SweepArgs),
    /// Check a quadrature identity with the boundary-integral oracle.
    Verify {
        /// QuadSpec JSON `{"a", "h", "bounded"}`, inline or a file path.
        #[arg(long)]
        spec: String,
        #[arg(long)]
        map: String,
        #[command(flatten)]
        output: Output,
    },
    /// Escape-time grid of the Schwarz reflection or of `e^{w̄−1}`.
    Dynamics {
        /// `teardrop`, `exp`, or MapSpec JSON.
        #[arg(long, default_value = "teardrop")]
        map: String,
        #[arg(long, default_value = "-3,-3,3,3", allow_hyphen_values = true)]
        region: String,
        #[arg(long, default_value_t = 800)]
        res: usize,
        #[arg(long, default_value_t = schwarzdyn::DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long, default_value_t = 50.0)]
        escape_radius: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Boundary curve of a map as SVG, CSV or JSON.
    Render {
        #[arg(long)]
        map: String,
        #[command(flatten)]
        output: Output,
    },
    /// Power-weighted problems.
    #[command(subcommand)]
    Pqd(PqdCommand),
    /// Log-weighted problems.
    #[command(subcommand)]
    Lqd(LqdCommand),
}

#[derive(Debug, Subcommand)]
pub enum PqdCommand {
    /// Inverse problem for `QD_a(h)`.
    Solve {
        #[arg(long)]
        a: f64,
        #[command(flatten)]
        inv: InverseArgs,
    },
    /// Member of the monomial family `h = α k w^{k−1}`.
    Monomial {
        #[arg(long)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        contains_zero: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Member of the one-point family `h = α/(w − w₀)`.
    OnePoint {
        #[arg(long)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        w0: String,
        /// Conformal radius; the bounded domain when absent.
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        contains_zero: bool,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Subcommand)]
pub enum LqdCommand {
    /// Inverse problem for the log weight.
    Solve {
        #[command(flatten)]
        inv: InverseArgs,
    },
    /// Power-weighted maps approaching the log-weighted one as `a → 0`.
    Limit {
        #[arg(long)]
        h: String,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value = "0.5,0.1,0.01,0.001")]
        a_seq: String,
        #[command(flatten)]
        output: Output,
    },
    /// Quadrature function of `{1/w : w ∈ Ω}` for a bounded problem.
    Invert {
        #[arg(long)]
        h: String,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Classical unbounded one-point family (`--alpha`, `--w0`).
    OnePoint,
    /// Monomial family (`--a`, `--alpha`, `--k`); `--a 0` is the log weight.
    Monomial,
    /// Unbounded power-weighted one-point family (`--a`, `--alpha`, `--w0`).
    PowerOnePoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parameter {
    C,
    T,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    pub w0: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "c")]
    pub param: Parameter,
    /// `lo,hi`.
    #[arg(long)]
    pub range: String,
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[command(flatten)]
    pub output: Output,
}

/// A parameter sweep as requested on the command line.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepConfig {
    pub family: Family,
    pub a: f64,
    pub alpha: C,
    pub w0: Option<C>,
    pub k: usize,
    pub parameter: Parameter,
    pub range: (f64, f64, usize),
}

impl SweepConfig {
    pub fn validate(&self) -> CliResult<()> {
        let (lo, hi, steps) = self.range;
        if !(lo < hi) || steps < 1 {
            return Err(CliError::Input("sweep range needs lo < hi and steps ≥ 1".into()));
        }
        if self.parameter == Parameter::T && self.family != Family::OnePoint {
            return Err(CliError::Input("the area parameter is available for the classical one-point family".into()));
        }
        if self.family != Family::Monomial && self.w0.is_none() {
            return Err(CliError::Input("this family needs --w0".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let (lo, hi, steps) = self.range;
        if steps == 1 {
            return vec![lo];
        }
        (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()
    }
}

/// One member of a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceStep {
    pub param: f64,
    pub c: f64,
    pub map: Option<MapSpec>,
    pub univalent: bool,
    /// Univalence differs from the previous step.
    pub critical: bool,
    pub error: Option<String>,
}

/// Result of a parameter sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FamilyTrace {
    pub config: SweepConfig,
    pub steps: Vec<TraceStep>,
    /// Critical conformal radius when the family has a closed form for it.
    pub c_critical: Option<f64>,
}

/// Steps computed serially before the rest of the grid runs in parallel.
const WARM_UP: usize = 3;

pub fn sweep(cfg: &SweepConfig) -> CliResult<FamilyTrace> {
    cfg.validate()?;
    let values = cfg.values();
    let head = values.len().min(WARM_UP);
    let mut steps: Vec<TraceStep> = values[..head].iter().map(|&v| sweep_step(cfg, v)).collect();
    let tail: Vec<TraceStep> = values[head..].par_iter().map(|&v| sweep_step(cfg, v)).collect();
    steps.extend(tail);
    for i in 1..steps.len() {
        let (a, b) = (&steps[i - 1], &steps[i]);
        let flip = a.map.is_some() && b.map.is_some() && a.univalent != b.univalent;
        steps[i].critical = flip;
    }
    let c_critical = match cfg.family {
        Family::OnePoint => classical::classify_one_point(cfg.alpha, cfg.w0.unwrap_or_default()).c_star,
        Family::Monomial if cfg.a == 0.0 => {
            let v = cfg.alpha.norm() * (cfg.k * cfg.k) as f64;
            (v > 0.0).then(|| v.powf(-1.0 / cfg.k as f64))
        }
        Family::Monomial => pqd::monomial_critical_radius(cfg.a, cfg.alpha, cfg.k),
        Family::PowerOnePoint => None,
    };
    Ok(FamilyTrace { config: cfg.clone(), steps, c_critical })
}

fn sweep_step(cfg: &SweepConfig, v: f64) -> TraceStep {
    let mut step = TraceStep { param: v, c: v, map: None, univalent: false, critical: false, error: None };
    let w0 = cfg.w0.unwrap_or_default();
    let r: crate::Result<(MapSpec, bool, f64)> = match (cfg.family, cfg.parameter) {
        (Family::OnePoint, Parameter::C) => classical::one_point_family(cfg.alpha, w0, v).map(|m| (m.map, m.univalent, v)),
        (Family::OnePoint, Parameter::T) => one_point_at_area(cfg.alpha, w0, v),
        (Family::Monomial, _) if cfg.a == 0.0 => {
            lqd::log_monomial(cfg.alpha, cfg.k, v).map(|m| (m, lqd::log_monomial_univalent(cfg.alpha, cfg.k, v), v))
        }
        (Family::Monomial, _) => pqd::monomial_family(cfg.a, cfg.alpha, cfg.k, v, false).map(|m| (m.map, m.univalent, v)),
        (Family::PowerOnePoint, _) => pqd::one_point_power(cfg.a, cfg.alpha, w0, Some(v), false).and_then(|m| {
            let u = univalence_check(&m.map, 1024)?.is_univalent();
            Ok((m.map, u, v))
        }),
    };
    match r {
        Ok((m, u, c)) => {
            step.map = Some(m);
            step.univalent = u;
            step.c = c;
        }
        Err(e) => step.error = Some(e.to_string()),
    }
    step
}

/// One-point member whose complement has area `t`, by bisection in `c`.
fn one_point_at_area(alpha: C, w0: C, t: f64) -> crate::Result<(MapSpec, bool, f64)> {
    let area = |c: f64| -> crate::Result<f64> {
        let m = classical::one_point_family(alpha, w0, c)?;
        m.t.or(m.t_closed).ok_or(QuadError::NonFinite)
    };
    let mut lo = 1e-6;
    let mut hi = 1.0;
    while area(hi)? < t {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(QuadError::NoRoot(format!("no member with area {t}")));
        }
    }
    if area(lo)? > t {
        return Err(QuadError::NoRoot(format!("no member with area {t}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if area(mid)? < t {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    let c = 0.5 * (lo + hi);
    let m = classical::one_point_family(alpha, w0, c)?;
    Ok((m.map, m.univalent, c))
}

/// Parse `1+2i`, `-0.5`, `3i`, `-i` or `re,im`.
pub fn parse_complex(s: &str) -> CliResult<C> {
    let bad = || CliError::Input(format!("cannot parse complex number `{s}`"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some((re, im)) = t.split_once(',') {
        return Ok(C::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?));
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t.parse::<f64>().map(|x| C::new(x, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let imag = |p: &str| -> CliResult<f64> {
        match p {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => p.parse().map_err(|_| bad()),
        }
    };
    match split {
        Some(i) => Ok(C::new(body[..i].parse().map_err(|_| bad())?, imag(&body[i..])?)),
        None => Ok(C::new(0.0, imag(body)?)),
    }
}

fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| CliError::Input(format!("cannot parse number list `{s}`"))))
        .collect()
}

/// JSON given inline or as a file path.
fn read_json<T: DeserializeOwned>(arg: &str) -> CliResult<T> {
    let t = arg.trim_start();
    let text = if t.starts_with('{') || t.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::Input(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("invalid JSON: {e}")))
}

fn read_map(arg: &str) -> CliResult<MapSpec> {
    read_json(arg)
}

fn normalization(w0: &Option<String>, c: Option<f64>) -> CliResult<(Normalization, bool)> {
    match (w0, c) {
        (Some(w), None) => Ok((Normalization::W0(parse_complex(w)?), true)),
        (None, Some(c)) => Ok((Normalization::C(c), false)),
        _ => Err(CliError::Input("give exactly one of --w0 (bounded) or --c (unbounded)".into())),
    }
}

fn nodes(o: &Output) -> usize {
    o.nodes.unwrap_or_else(default_nodes)
}

fn format_of(o: &Output, default: Format) -> Format {
    if let Some(f) = o.format {
        return f;
    }
    let ext = o.out.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase());
    match ext.as_deref() {
        Some("svg") => Format::Svg,
        Some("csv") => Format::Csv,
        Some("png") => Format::Png,
        Some("ppm") => Format::Ppm,
        Some("json") => Format::Json,
        _ => default,
    }
}

fn write_text(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{text}").and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable output")
}

/// Emit a JSON payload, or the boundary of `maps` for SVG/CSV.
fn emit<T: Serialize>(o: &Output, payload: &T, maps: &[&MapSpec]) -> CliResult<()> {
    let n = nodes(o);
    match format_of(o, Format::Json) {
        Format::Json => write_text(o.out.as_deref(), &to_json(payload)),
        Format::Svg => write_text(o.out.as_deref(), &svg(maps, n)?),
        Format::Csv => match maps {
            [m] => write_text(o.out.as_deref(), &csv(m, n)?),
            _ => {
                let out = o.out.as_ref().ok_or_else(|| CliError::Input("CSV for several curves needs --out".into()))?;
                for (i, m) in maps.iter().enumerate() {
                    write_text(Some(&indexed_path(out, i)), &csv(m, n)?)?;
                }
                Ok(())
            }
        },
        Format::Png | Format::Ppm => Err(CliError::Input("raster output is only available for dynamics".into())),
    }
}

fn indexed_path(p: &Path, i: usize) -> PathBuf {
    let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("curve");
    let ext = p.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    p.with_file_name(format!("{stem}_{i:03}.{ext}"))
}

/// Boundary samples as CSV with columns `theta,re,im`.
pub fn csv(m: &MapSpec, n: usize) -> CliResult<String> {
    let curve = m.boundary_curve(n)?;
    let mut s = String::from("theta,re,im\n");
    for p in &curve.samples {
        let _ = writeln!(s, "{:.17e},{:.17e},{:.17e}", p.theta, p.w.re, p.w.im);
    }
    Ok(s)
}

/// Closed boundary polylines. The bounded region enclosed by each curve
/// is shaded: the domain itself when bounded, its complement otherwise.
pub fn svg(maps: &[&MapSpec], n: usize) -> CliResult<String> {
    let mut curves = vec![];
    for m in maps {
        curves.push((m.boundary_curve(n)?.points(), m.is_interior()));
    }
    let pts = curves.iter().flat_map(|(p, _)| p.iter()).filter(|w| w.is_finite());
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for w in pts {
        x0 = x0.min(w.re);
        x1 = x1.max(w.re);
        y0 = y0.min(w.im);
        y1 = y1.max(w.im);
    }
    if !x0.is_finite() {
        return Err(CliError::Input("no finite boundary samples".into()));
    }
    let pad = 0.05 * (x1 - x0).max(y1 - y0).max(1e-9);
    let (vx, vy, vw, vh) = (x0 - pad, -(y1 + pad), x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
    let stroke = 0.004 * vw.max(vh);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{vx:.6} {vy:.6} {vw:.6} {vh:.6}\" width=\"600\" height=\"{:.0}\">\n",
        600.0 * vh / vw
    );
    for (points, bounded) in &curves {
        let (class, fill) = if *bounded { ("domain", "#9ecae1") } else { ("complement", "#bdbdbd") };
        let mut d = String::new();
        for (i, w) in points.iter().enumerate() {
            let _ = write!(d, "{}{:.6},{:.6} ", if i == 0 { "M" } else { "L" }, w.re, -w.im);
        }
        d.push('Z');
        let _ = writeln!(
            s,
            "  <path class=\"{class}\" d=\"{d}\" fill=\"{fill}\" fill-opacity=\"0.5\" fill-rule=\"nonzero\" stroke=\"black\" stroke-width=\"{stroke:.6}\"/>"
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// The weight parameter of a map: `1` rational, `a` power, `0` exponential.
fn weight_of(m: &MapSpec) -> f64 {
    match m.kind {
        MapKind::Rational => 1.0,
        MapKind::Power { a } => a,
        MapKind::Log => 0.0,
    }
}

/// Verify `map` against `h` with the default test functions.
pub fn verify(m: &MapSpec, a: f64, h: &RationalFn, n: usize) -> CliResult<ResidualReport> {
    let tests = default_tests(m)?;
    Ok(verify_with_expansion(m, a, &h.partial_fractions()?, &tests, n)?)
}

fn check(report: &ResidualReport) -> CliResult<()> {
    if report.passes(VERIFY_TOL) {
        Ok(())
    } else {
        Err(CliError::Verify(report.max_rel))
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DirectOutput {
    spec: QuadSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<ResidualReport>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct InverseOutput {
    solution: InverseSolution,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<ResidualReport>,
}

fn solve_direct(map: &str, no_verify: bool, o: &Output) -> CliResult<()> {
    let m = read_map(map)?;
    let a = weight_of(&m);
    let h = match m.kind {
        MapKind::Rational => classical::direct_problem(&m)?.h,
        MapKind::Power { .. } => pqd::direct_problem_power(&m)?.h.to_rational(),
        MapKind::Log => lqd::direct_problem_log(&m)?.h.to_rational(),
    };
    let spec = QuadSpec { a, h, bounded: m.is_interior() };
    let verification = if no_verify { None } else { Some(verify(&m, a, &spec.h, nodes(o))?) };
    emit(o, &DirectOutput { spec, verification: verification.clone() }, &[&m])?;
    verification.as_ref().map_or(Ok(()), check)
}

fn solve_inverse(a: f64, inv: &InverseArgs) -> CliResult<()> {
    let h: RationalFn = read_json(&inv.h)?;
    let (norm, bounded) = normalization(&inv.w0, inv.c)?;
    let sol = if a == 1.0 && !inv.contains_zero {
        classical::inverse_problem(&QuadSpec { a, h: h.clone(), bounded }, norm)?
    } else if a == 0.0 {
        lqd::inverse_problem_log(&LqdProblem::new(h.clone(), bounded)?, norm)?
    } else {
        pqd::inverse_problem_power(&PqdProblem::new(a, h.clone(), bounded, inv.contains_zero)?, norm)?
    };
    if let Some(w) = &sol.warning {
        eprintln!("warning: {w}");
    }
    let verification = if inv.no_verify { None } else { Some(verify(&sol.map, a, &h, nodes(&inv.output))?) };
    let map = sol.map.clone();
    emit(&inv.output, &InverseOutput { solution: sol, verification: verification.clone() }, &[&map])?;
    verification.as_ref().map_or(Ok(()), check)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DynamicsSummary {
    map: String,
    nx: usize,
    ny: usize,
    max_iter: usize,
    escape_fraction: f64,
    faults: usize,
}

fn dynamics(map: &str, region: &str, res: usize, max_iter: usize, radius: f64, o: &Output) -> CliResult<()> {
    let r = parse_list(region)?;
    let [x0, y0, x1, y1] = r[..] else {
        return Err(CliError::Input("region is x0,y0,x1,y1".into()));
    };
    let region = Region::new(x0, y0, x1, y1)?;
    let grid: EscapeGrid = match map {
        "exp" => schwarzdyn::antiholo_exp_julia(region, res, res, max_iter, radius)?,
        "teardrop" => schwarzdyn::escape_grid(&schwarzdyn::teardrop(), region, res, res, max_iter)?,
        other => schwarzdyn::escape_grid(&read_map(other)?, region, res, res, max_iter)?,
    };
    let summary = DynamicsSummary {
        map: if map == "exp" || map == "teardrop" { map.to_string() } else { "custom".into() },
        nx: grid.nx,
        ny: grid.ny,
        max_iter,
        escape_fraction: grid.escape_fraction(),
        faults: grid.fault_count(),
    };
    match (format_of(o, Format::Json), o.out.as_deref()) {
        (Format::Png, Some(p)) => grid.write_png(p).map_err(|e| CliError::Input(e.to_string()))?,
        (Format::Ppm, Some(p)) => grid.write_ppm(p)?,
        (Format::Json, out) => return write_text(out, &to_json(&grid)),
        (Format::Png | Format::Ppm, None) => return Err(CliError::Input("raster output needs --out".into())),
        _ => return Err(CliError::Input("dynamics writes png, ppm or json".into())),
    }
    write_text(None, &to_json(&summary))
}

pub fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::SolveDirect { map, no_verify, output } => solve_direct(&map, no_verify, &output),
        Command::SolveInverse { a, inv } => solve_inverse(a, &inv),
        Command::Classify { alpha, w0 } => {
            let rep = classical::classify_one_point(parse_complex(&alpha)?, parse_complex(&w0)?);
            write_text(None, &to_json(&rep))
        }
        Command::Sweep(s) => {
            let cfg = SweepConfig {
                family: s.family,
                a: s.a,
                alpha: parse_complex(&s.alpha)?,
                w0: s.w0.as_deref().map(parse_complex).transpose()?,
                k: s.k,
                parameter: s.param,
                range: match parse_list(&s.range)?[..] {
                    [lo, hi] => (lo, hi, s.steps),
                    _ => return Err(CliError::Input("range is lo,hi".into())),
                },
            };
            let trace = sweep(&cfg)?;
            let maps: Vec<&MapSpec> = trace.steps.iter().filter_map(|t| t.map.as_ref()).collect();
            emit(&s.output, &trace, &maps)
        }
        Command::Verify { spec, map, output } => {
            let q: QuadSpec = read_json(&spec)?;
            let m = read_map(&map)?;
            let report = verify(&m, q.a, &q.h, nodes(&output))?;
            write_text(output.out.as_deref(), &to_json(&report))?;
            check(&report)
        }
        Command::Dynamics { map, region, res, max_iter, escape_radius, output } => {
            dynamics(&map, &region, res, max_iter, escape_radius, &output)
        }
        Command::Render { map, output } => {
            let m = read_map(&map)?;
            let curve = m.boundary_curve(nodes(&output))?;
            emit(&output, &curve, &[&m])
        }
        Command::Pqd(PqdCommand::Solve { a, inv }) => {
            if !(a > 0.0) {
                return Err(CliError::Input("power weights need a > 0".into()));
            }
            solve_inverse(a, &inv)
        }
        Command::Pqd(PqdCommand::Monomial { a, alpha, k, c, contains_zero, output }) => {
            let alpha = parse_complex(&alpha)?;
            let c = match c {
                Some(c) => c,
                None => pqd::monomial_critical_radius(a, alpha, k)
                    .ok_or_else(|| CliError::Input("no critical radius; give --c".into()))?,
            };
            let m = pqd::monomial_family(a, alpha, k, c, contains_zero)?;
            let map = m.map.clone();
            emit(&output, &m, &[&map])
        }
        Command::Pqd(PqdCommand::OnePoint { a, alpha, w0, c, contains_zero, output }) => {
            let m = pqd::one_point_power(a, parse_complex(&alpha)?, parse_complex(&w0)?, c, contains_zero)?;
            let map = m.map.clone();
            emit(&output, &m, &[&map])
        }
        Command::Lqd(LqdCommand::Solve { inv }) => solve_inverse(0.0, &inv),
        Command::Lqd(LqdCommand::Limit { h, c, a_seq, output }) => {
            let p = LqdProblem::new(read_json(&h)?, false)?;
            let rep = lqd::pqd_limit(&p, Normalization::C(c), &parse_list(&a_seq)?)?;
            let map = rep.limit.clone();
            emit(&output, &rep, &[&map])
        }
        Command::Lqd(LqdCommand::Invert { h, output }) => {
            let p = LqdProblem::new(read_json(&h)?, true)?;
            let q = lqd::invert_domain(&p)?;
            write_text(output.out.as_deref(), &to_json(&q))
        }
    }
}

/// Parse `argv`, run, and map the outcome to an exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("1+0i").unwrap(), C::new(1.0, 0.0));
        assert_eq!(parse_complex("-0.5").unwrap(), C::new(-0.5, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), C::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), C::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3-2.5e+1i").unwrap(), C::new(1e-3, -25.0));
        assert_eq!(parse_complex("0.3, -2").unwrap(), C::new(0.3, -2.0));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn sweep_marks_the_univalence_flip() {
        let cfg = SweepConfig {
            family: Family::Monomial,
            a: 0.0,
            alpha: C::new(1.0, 0.0),
            w0: None,
            k: 2,
            parameter: Parameter::C,
            range: (0.3, 0.7, 9),
        };
        let t = sweep(&cfg).unwrap();
        assert_eq!(t.steps.len(), 9);
        assert_eq!(t.steps.iter().filter(|s| s.critical).count(), 1);
        assert!((t.c_critical.unwrap() - 0.5).abs() < 1e-12);
        assert!(t.steps[0].univalent && !t.steps[8].univalent);
    }

    #[test]
    fn bad_range_is_an_input_error() {
        let cfg = SweepConfig {
            family: Family::Monomial,
            a: 0.0,
            alpha: C::new(1.0, 0.0),
            w0: None,
            k: 1,
            parameter: Parameter::C,
            range: (1.0, 0.5, 3),
        };
        assert_eq!(sweep(&cfg).unwrap_err().exit_code(), EXIT_INPUT);
    }
}
