//! Command-line front end: scale DSL + expression input, CSV signal
//! ingestion, and machine-readable JSON/CSV output.
//!
//! Exit codes: 0 success, 1 law-suite failure, 2 evaluation/domain error,
//! 64 usage error.

use crate::error::{Error, Result};
use crate::fracderiv::{
    chain_rule_witness, higher_frac_derivative, FnOnScale, FractionalOrder,
    HigherOrder, LimitParams,
};
use crate::integral::frac_indefinite_integral;
use crate::laws::{run_randomized_suite, LawReport};
use crate::number::{approx_eq, parse_rational, parse_real, tol_at};
use crate::timescale::{Component, TimeScale};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_LAW_FAILURE: i32 = 1;
pub const EXIT_EVAL_ERROR: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "chronofrac",
    version,
    about = "Fractional derivatives and integrals on arbitrary time scales"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Evaluate a fractional derivative at a point or over a grid.
    Deriv(DerivArgs),
    /// Evaluate a Cauchy fractional integral.
    Integ(IntegArgs),
    /// Find the chain-rule mean-value witness c in [t, sigma(t)].
    Chain(ChainArgs),
    /// Run the randomized law suite and report residuals.
    Laws(LawsArgs),
    /// Describe a scale point: jump operators, graininess, classification.
    Info(InfoArgs),
}

#[derive(Debug, Args)]
struct FnSource {
    /// Closed-form expression in t, e.g. "t^2 - sin(t)".
    #[arg(long = "fn")]
    function: Option<String>,
    /// Two-column CSV (t,value); the timestamps become the scale.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OutputOpts {
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Limit-engine relative tolerance (also via CHRONOFRAC_TOL).
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct DerivArgs {
    /// Scale DSL: R | R[a,b] | Z | hZ:<h>[@anchor] | cantor:<d> | union:{...}.
    #[arg(long)]
    scale: Option<String>,
    #[command(flatten)]
    source: FnSource,
    /// Derivative order beta >= 0, as a rational or finite decimal.
    #[arg(long)]
    order: String,
    /// Evaluation point.
    #[arg(long)]
    at: Option<String>,
    /// Evaluate everywhere in the window: all scattered points plus this
    /// many equispaced points per dense segment.
    #[arg(long)]
    grid: Option<u32>,
    /// Window "lo,hi"; required for --grid on unbounded scales.
    #[arg(long)]
    window: Option<String>,
    #[command(flatten)]
    out: OutputOpts,
}

#[derive(Debug, Args)]
struct IntegArgs {
    #[arg(long)]
    scale: Option<String>,
    #[command(flatten)]
    source: FnSource,
    /// Integral order beta in [0, 1].
    #[arg(long)]
    order: String,
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
    /// Window "lo,hi"; defaults to [min(a,b), sigma(max(a,b))].
    #[arg(long)]
    window: Option<String>,
    /// Antiderivative base point t0 (the result does not depend on it).
    #[arg(long)]
    anchor: Option<String>,
    #[command(flatten)]
    out: OutputOpts,
}

#[derive(Debug, Args)]
struct ChainArgs {
    #[arg(long)]
    scale: Option<String>,
    /// Outer function f (expression in t).
    #[arg(long)]
    outer: String,
    /// Inner function g.
    #[command(flatten)]
    source: FnSource,
    /// Order alpha < 1.
    #[arg(long)]
    order: String,
    #[arg(long)]
    at: String,
    #[command(flatten)]
    out: OutputOpts,
}

#[derive(Debug, Args)]
struct LawsArgs {
    #[arg(long, default_value = "1")]
    seed: u64,
    /// Randomized cases per law; must be positive.
    #[arg(long, default_value = "200")]
    cases: u32,
    /// Test hook: corrupt one residual to exercise the failure path.
    #[arg(long, hide = true)]
    inject_fault: bool,
    #[command(flatten)]
    out: OutputOpts,
}

#[derive(Debug, Args)]
struct InfoArgs {
    #[arg(long)]
    scale: String,
    #[arg(long)]
    at: String,
    #[command(flatten)]
    out: OutputOpts,
}

/// Parses argv and runs the selected command, returning the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.cmd {
        Cmd::Deriv(args) => cmd_deriv(args),
        Cmd::Integ(args) => cmd_integ(args),
        Cmd::Chain(args) => cmd_chain(args),
        Cmd::Laws(args) => cmd_laws(args),
        Cmd::Info(args) => cmd_info(args),
    };
    match outcome {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Eval(e)) => {
            eprintln!("error: {e}");
            EXIT_EVAL_ERROR
        }
    }
}

enum CliError {
    Usage(String),
    Eval(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Eval(e)
    }
}

type CmdResult = std::result::Result<i32, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn limit_params(tol_flag: Option<f64>) -> LimitParams {
    let mut params = LimitParams::default();
    if let Some(tol) = tol_flag.or_else(|| {
        std::env::var("CHRONOFRAC_TOL")
            .ok()
            .and_then(|v| v.parse().ok())
    }) {
        params.tol = tol;
    }
    params
}

/// Resolves the scale and function from either `--scale`+`--fn` or `--csv`.
fn resolve_source(
    scale: Option<&str>,
    source: &FnSource,
) -> std::result::Result<(TimeScale, FnOnScale), CliError> {
    match (&source.function, &source.csv) {
        (Some(_), Some(_)) => Err(usage("--fn and --csv are mutually exclusive")),
        (None, None) => Err(usage("one of --fn or --csv is required")),
        (Some(text), None) => {
            let scale_text = scale.ok_or_else(|| usage("--scale is required with --fn"))?;
            let scale: TimeScale = scale_text.parse()?;
            Ok((scale, FnOnScale::parse(text)?))
        }
        (None, Some(path)) => {
            if scale.is_some() {
                return Err(usage("--scale conflicts with --csv (the CSV defines the scale)"));
            }
            Ok(ingest_csv(path)?)
        }
    }
}

/// Reads a two-column CSV (`t,value`, header optional) into a scale of
/// isolated points plus a table-backed function.
pub fn ingest_csv(path: &std::path::Path) -> Result<(TimeScale, FnOnScale)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
    let mut rows: Vec<(f64, f64)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (a, b) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a.trim(), b.trim()),
            _ => {
                return Err(Error::CsvParse {
                    line: idx + 1,
                    msg: "expected exactly two columns".into(),
                })
            }
        };
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(t), Ok(v)) => rows.push((t, v)),
            _ if idx == 0 => continue, // header row
            _ => {
                return Err(Error::CsvParse {
                    line: idx + 1,
                    msg: format!("cannot parse `{line}` as numbers"),
                })
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::CsvParse {
            line: 1,
            msg: "no data rows".into(),
        })
    }
    let table = FnOnScale::from_samples(rows)?;
    let points = match &table {
        FnOnScale::TableBacked(rows) => rows.iter().map(|&(t, _)| Component::Point(t)).collect(),
        FnOnScale::ExprBacked(_) => unreachable!("from_samples builds tables"),
    };
    Ok((TimeScale::finite_union(points)?, table))
}

fn parse_window(text: &str) -> std::result::Result<(f64, f64), CliError> {
    let (lo, hi) = text
        .split_once(',')
        .ok_or_else(|| usage(format!("window `{text}` must be `lo,hi`")))?;
    let lo = parse_real(lo)?;
    let hi = parse_real(hi)?;
    if lo >= hi {
        return Err(usage(format!("window `{text}` must satisfy lo < hi")));
    }
    Ok((lo, hi))
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

/// 17-significant-digit form used in JSON (round-trips exactly).
fn json_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

/// Shortest round-trip form used in CSV.
fn csv_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        "inf".into()
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization cannot fail")
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One output row: named fields, each either a number or a string.
enum Field {
    Num(f64),
    Text(String),
}

struct Row {
    fields: Vec<(&'static str, Field)>,
}

fn emit_rows(format: Format, header: &[&'static str], rows: &[Row]) {
    match format {
        Format::Json => {
            for row in rows {
                let body: Vec<String> = row
                    .fields
                    .iter()
                    .map(|(name, field)| {
                        let value = match field {
                            Field::Num(x) => json_num(*x),
                            Field::Text(s) => json_str(s),
                        };
                        format!("{}:{}", json_str(name), value)
                    })
                    .collect();
                println!("{{{}}}", body.join(","));
            }
        }
        Format::Csv => {
            println!("{}", header.join(","));
            for row in rows {
                let mut by_name: Vec<String> = Vec::with_capacity(header.len());
                for name in header {
                    let cell = row
                        .fields
                        .iter()
                        .find(|(n, _)| n == name)
                        .map(|(_, field)| match field {
                            Field::Num(x) => csv_num(*x),
                            Field::Text(s) => csv_field(s),
                        })
                        .unwrap_or_default();
                    by_name.push(cell);
                }
                println!("{}", by_name.join(","));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

/// All scattered points in the window plus `per_dense` equispaced points per
/// dense segment.
fn grid_points(scale: &TimeScale, window: (f64, f64), per_dense: u32) -> Result<Vec<f64>> {
    let mut points = Vec::new();
    for seg in scale.segments_in_window(window.0, window.1)? {
        if seg.is_point() {
            points.push(seg.lo);
        } else if per_dense == 1 {
            points.push(0.5 * (seg.lo + seg.hi));
        } else {
            for i in 0..per_dense {
                let frac = i as f64 / (per_dense - 1) as f64;
                points.push(seg.lo + (seg.hi - seg.lo) * frac);
            }
        }
    }
    Ok(points)
}

#[cfg(feature = "parallel")]
fn eval_points<F>(points: &[f64], eval: F) -> Vec<Row>
where
    F: Fn(f64) -> Row + Send + Sync,
{
    use rayon::prelude::*;
    // Indexed map + ordered collect keeps output rows in point order.
    points.par_iter().map(|&t| eval(t)).collect()
}

#[cfg(not(feature = "parallel"))]
fn eval_points<F>(points: &[f64], eval: F) -> Vec<Row>
where
    F: Fn(f64) -> Row + Send + Sync,
{
    points.iter().map(|&t| eval(t)).collect()
}

fn cmd_deriv(args: DerivArgs) -> CmdResult {
    let (scale, f) = resolve_source(args.scale.as_deref(), &args.source)?;
    let order = HigherOrder::parse(&args.order)?;
    let params = limit_params(args.out.tol);
    let points: Vec<f64> = match (&args.at, args.grid) {
        (Some(_), Some(_)) => return Err(usage("--at and --grid are mutually exclusive")),
        (None, None) => return Err(usage("one of --at or --grid is required")),
        (Some(at), None) => vec![parse_real(at)?],
        (None, Some(n)) => {
            if n == 0 {
                return Err(usage("--grid must be positive"));
            }
            let window = match &args.window {
                Some(w) => parse_window(w)?,
                None => match (scale.min(), scale.max()) {
                    (Some(lo), Some(hi)) => (lo, hi),
                    _ => return Err(usage("--window is required for --grid on unbounded scales")),
                },
            };
            grid_points(&scale, window, n)?
        }
    };
    let rows = eval_points(&points, |t| {
        match higher_frac_derivative(&f, &scale, t, &order, &params) {
            Ok(d) => Row {
                fields: vec![
                    ("t", Field::Num(t)),
                    ("value", Field::Num(d.value)),
                    ("method", Field::Text(d.method.to_string())),
                    ("error_estimate", Field::Num(d.error_estimate)),
                ],
            },
            Err(e) => Row {
                fields: vec![
                    ("t", Field::Num(t)),
                    ("error", Field::Text(e.to_string())),
                ],
            },
        }
    });
    emit_rows(
        args.out.format,
        &["t", "value", "method", "error_estimate", "error"],
        &rows,
    );
    let all_ok = rows
        .iter()
        .all(|r| r.fields.iter().all(|(name, _)| *name != "error"));
    Ok(if all_ok { EXIT_OK } else { EXIT_EVAL_ERROR })
}

fn cmd_integ(args: IntegArgs) -> CmdResult {
    let (scale, f) = resolve_source(args.scale.as_deref(), &args.source)?;
    let beta = parse_rational(&args.order)?;
    let a = parse_real(&args.from)?;
    let b = parse_real(&args.to)?;
    let params = limit_params(args.out.tol);
    if !scale.contains(a) {
        return Err(Error::PointNotInScale(a).into());
    }
    if !scale.contains(b) {
        return Err(Error::PointNotInScale(b).into());
    }
    let window = match &args.window {
        Some(w) => parse_window(w)?,
        None => {
            let hi = b.max(a);
            (a.min(b), scale.sigma(hi)?.max(hi + tol_at(hi)))
        }
    };
    let anchor = args.anchor.as_deref().map(parse_real).transpose()?;
    let value = if approx_eq(a, b) {
        0.0
    } else {
        let fint = frac_indefinite_integral(&f, &scale, beta, window, anchor)?;
        fint.eval(b, &params)?.value - fint.eval(a, &params)?.value
    };
    let rows = [Row {
        fields: vec![
            ("from", Field::Num(a)),
            ("to", Field::Num(b)),
            ("order", Field::Text(beta.to_string())),
            ("value", Field::Num(value)),
        ],
    }];
    emit_rows(args.out.format, &["from", "to", "order", "value"], &rows);
    Ok(EXIT_OK)
}

fn cmd_chain(args: ChainArgs) -> CmdResult {
    let (scale, g) = resolve_source(args.scale.as_deref(), &args.source)?;
    let f = crate::expr::parse(&args.outer)?;
    let alpha = FractionalOrder::parse(&args.order)?;
    let t = parse_real(&args.at)?;
    let params = limit_params(args.out.tol);
    let c = chain_rule_witness(&f, &g, &scale, t, alpha, &params)?;
    let rows = [Row {
        fields: vec![
            ("t", Field::Num(t)),
            ("order", Field::Text(alpha.to_string())),
            ("witness", Field::Num(c)),
        ],
    }];
    emit_rows(args.out.format, &["t", "order", "witness"], &rows);
    Ok(EXIT_OK)
}

fn cmd_laws(args: LawsArgs) -> CmdResult {
    if args.cases == 0 {
        return Err(usage("--cases must be positive"));
    }
    let params = limit_params(args.out.tol);
    let mut reports = run_randomized_suite(args.seed, args.cases, &params)?;
    if args.inject_fault {
        if let Some(first) = reports.first_mut() {
            first.max_residual += 1.0;
            first.passed = first.max_residual <= first.threshold;
            first.worst_case = format!("injected fault: {}", first.worst_case);
        }
    }
    let rows: Vec<Row> = reports.iter().map(law_row).collect();
    emit_rows(
        args.out.format,
        &[
            "law_id",
            "cases_run",
            "max_residual",
            "worst_case",
            "passed",
            "threshold",
        ],
        &rows,
    );
    Ok(if reports.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_LAW_FAILURE
    })
}

fn law_row(report: &LawReport) -> Row {
    Row {
        fields: vec![
            ("law_id", Field::Text(report.law_id.clone())),
            ("cases_run", Field::Num(report.cases_run as f64)),
            ("max_residual", Field::Num(report.max_residual)),
            ("worst_case", Field::Text(report.worst_case.clone())),
            ("passed", Field::Text(report.passed.to_string())),
            ("threshold", Field::Num(report.threshold)),
        ],
    }
}

fn cmd_info(args: InfoArgs) -> CmdResult {
    let scale: TimeScale = args.scale.parse()?;
    let t = parse_real(&args.at)?;
    let class = scale.classify(t)?;
    let label = if class.is_isolated() {
        "isolated".to_string()
    } else {
        format!(
            "{},{}",
            if class.right_scattered { "right-scattered" } else { "right-dense" },
            if class.left_scattered { "left-scattered" } else { "left-dense" },
        )
    };
    let rows = [Row {
        fields: vec![
            ("t", Field::Num(t)),
            ("sigma", Field::Num(scale.sigma(t)?)),
            ("rho", Field::Num(scale.rho(t)?)),
            ("graininess", Field::Num(scale.graininess(t)?)),
            ("class", Field::Text(label)),
        ],
    }];
    emit_rows(
        args.out.format,
        &["t", "sigma", "rho", "graininess", "class"],
        &rows,
    );
    Ok(EXIT_OK)
}
