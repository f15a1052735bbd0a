//! `moisil`: evaluate curvilinear quaternionic operators and run the
//! verification suites from the command line.
//!
//! Exit codes: 0 success, 1 identity failure or evaluation error (such as a
//! point outside the chart domain), 2 usage or configuration error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use moisil::geometry::{builtin_chart, parse_point, Chart, DefinitionFile, FieldSpec, QuatField, BUILTIN_CHARTS};
use moisil::harness::{generate_corpus_on, golden_suite, identity_suite, GoldenTable, SuiteConfig, VerificationReport};
use moisil::operators::{DerivativeMode, FdScheme, LameParams, Op, OperatorConfig, Operators};
use moisil::quat::ComplexScalar;

#[derive(Parser)]
#[command(
    name = "moisil",
    version,
    about = "Moisil-Theodoresco operators in orthogonal curvilinear coordinates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Run the identity and closed-form suites and write a JSON report.
    Verify(VerifyArgs),
    /// Evaluate one operator on a field at one or more points.
    Eval(EvalArgs),
    /// List the built-in charts.
    Charts(ChartsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Symbolic,
    Fd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    Central2,
    Central4,
    Richardson,
}

#[derive(Args)]
struct ModeArgs {
    /// Derivative engine.
    #[arg(long, value_enum, default_value = "symbolic")]
    mode: Mode,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-4)]
    step: f64,
    /// Finite-difference stencil.
    #[arg(long, value_enum, default_value = "central2")]
    scheme: Scheme,
}

impl ModeArgs {
    fn config(&self) -> Result<OperatorConfig, String> {
        OperatorConfig {
            derivative_mode: match self.mode {
                Mode::Symbolic => DerivativeMode::Symbolic,
                Mode::Fd => DerivativeMode::FiniteDifference,
            },
            fd_step: self.step,
            fd_scheme: match self.scheme {
                Scheme::Central2 => FdScheme::Central2,
                Scheme::Central4 => FdScheme::Central4,
                Scheme::Richardson => FdScheme::Richardson,
            },
        }
        .validate()
        .map_err(|e| e.to_string())
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated chart names or chart definition files.
    #[arg(long, value_delimiter = ',', default_value = "cartesian,spherical,cylindrical")]
    charts: Vec<String>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Fields per chart.
    #[arg(long, default_value_t = 50)]
    count: usize,
    /// Sample points per field.
    #[arg(long, default_value_t = 4)]
    points: usize,
    /// Override every record's tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Report path (stdout when absent).
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[command(flatten)]
    mode: ModeArgs,
}

#[derive(Args)]
struct EvalArgs {
    /// Chart name or chart definition file. Defaults to the chart in --field.
    #[arg(long)]
    chart: Option<String>,
    /// Definition file with a chart and a field.
    #[arg(long, conflicts_with_all = ["f0", "f1", "f2", "f3", "f0i", "f1i", "f2i", "f3i"])]
    field: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    f0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    f1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    f2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    f3: Option<String>,
    /// Imaginary part of f0 (likewise --f1i, --f2i, --f3i).
    #[arg(long, allow_hyphen_values = true)]
    f0i: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    f1i: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    f2i: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    f3i: Option<String>,
    /// Named constant used in inline components, as `name=value`.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// Operator: grad, div, curl, mt, mtr, lap0, lapv, laph, bitsv, bitsh, lame.
    #[arg(long)]
    op: String,
    /// Point as comma-separated coordinates in chart order; repeatable.
    #[arg(long = "point", required = true, allow_hyphen_values = true)]
    points: Vec<String>,
    /// Shear modulus for `lame`.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// First Lamé parameter for `lame`.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    lambda: f64,
    #[command(flatten)]
    mode: ModeArgs,
}

#[derive(Args)]
struct ChartsArgs {
    /// Show only this chart.
    #[arg(long)]
    name: Option<String>,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn failed(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn looks_like_file(s: &str) -> bool {
    s.ends_with(".json") || s.contains('/') || s.contains('\\')
}

fn read_definition(path: &Path) -> Result<DefinitionFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    DefinitionFile::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn chart_from_definition(def: &DefinitionFile, origin: &str) -> Result<Arc<Chart>, Failure> {
    let chart = def.chart().map_err(|e| usage(format!("{origin}: {e}")))?;
    if !chart.is_validated() {
        return Err(usage(format!(
            "{origin}: chart `{}` has no region to validate orthogonality on; add a \"region\"",
            chart.name()
        )));
    }
    Ok(Arc::new(chart))
}

fn load_chart(spec: &str) -> Result<Arc<Chart>, Failure> {
    if looks_like_file(spec) {
        let def = read_definition(Path::new(spec))?;
        chart_from_definition(&def, spec)
    } else {
        builtin_chart(spec)
            .map(Arc::new)
            .map_err(|e| usage(format!("{e} (built-in charts: {})", BUILTIN_CHARTS.join(", "))))
    }
}

fn run_verify(args: VerifyArgs) -> Result<ExitCode, Failure> {
    let operator = args.mode.config().map_err(usage)?;
    if args.count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    if args.points == 0 {
        return Err(usage("--points must be at least 1"));
    }
    if let Some(t) = args.tolerance {
        if !(t.is_finite() && t >= 0.0) {
            return Err(usage("--tolerance must be a non-negative number"));
        }
    }
    let charts = args
        .charts
        .iter()
        .map(|c| load_chart(c.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    let config = SuiteConfig {
        operator,
        points_per_field: args.points,
        tolerance: args.tolerance,
    };
    let mut report = VerificationReport::new("verify", args.seed, args.count, args.points, &operator, args.tolerance);
    for chart in charts {
        let corpus = generate_corpus_on(args.seed, args.count, chart.clone()).map_err(|e| usage(e.to_string()))?;
        report.merge(identity_suite(&corpus, &config).map_err(|e| usage(e.to_string()))?);
        if GoldenTable::builtin().for_chart(chart.name()).next().is_some() {
            report.merge(golden_suite(&corpus, &config).map_err(|e| usage(e.to_string()))?);
        }
    }
    for r in &report.records {
        let err = r.max_error.map_or_else(|| "n/a".to_string(), |e| format!("{e:.3e}"));
        eprintln!(
            "{} {:<12} {:<28} max_error {:>10} tolerance {:.0e}{}",
            if r.pass { "PASS" } else { "FAIL" },
            r.chart,
            r.id,
            err,
            r.tolerance,
            r.error.as_ref().map(|e| format!(" ({e})")).unwrap_or_default()
        );
    }
    for d in &report.diagnostics {
        eprintln!("NOTE {:<12} {}: {}", d.chart, d.id, d.message);
    }
    let json = report.to_json();
    match &args.output {
        Some(path) => std::fs::write(path, json).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{json}"),
    }
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn parse_params(raw: &[String]) -> Result<Vec<(String, f64)>, Failure> {
    raw.iter()
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| usage(format!("--param `{p}` must be NAME=VALUE")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| usage(format!("--param `{p}`: bad value")))?;
            if !v.is_finite() {
                return Err(usage(format!("--param `{p}`: value must be finite")));
            }
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn eval_field(args: &EvalArgs) -> Result<QuatField, Failure> {
    if let Some(path) = &args.field {
        let def = read_definition(path)?;
        let origin = path.display().to_string();
        let chart = chart_from_definition(&def, &origin)?;
        if let Some(name) = &args.chart {
            let wanted = load_chart(name)?;
            if wanted.name() != chart.name() {
                return Err(usage(format!(
                    "--chart `{}` does not match chart `{}` in {origin}",
                    wanted.name(),
                    chart.name()
                )));
            }
        }
        return def.field(chart).map_err(|e| usage(format!("{origin}: {e}")));
    }
    let chart = load_chart(
        args.chart
            .as_deref()
            .ok_or_else(|| usage("eval needs --chart or --field"))?,
    )?;
    let params = parse_params(&args.params)?;
    let params: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let spec = FieldSpec {
        re: [&args.f0, &args.f1, &args.f2, &args.f3].map(|s| s.as_deref()),
        im: [&args.f0i, &args.f1i, &args.f2i, &args.f3i].map(|s| s.as_deref()),
    };
    QuatField::parse(chart, &spec, &params).map_err(|e| usage(e.to_string()))
}

fn complex_json(c: ComplexScalar) -> serde_json::Value {
    json!({ "re": c.re, "im": c.im })
}

fn run_eval(args: EvalArgs) -> Result<ExitCode, Failure> {
    let config = args.mode.config().map_err(usage)?;
    let lame = if args.op == "lame" {
        Some(LameParams::new(args.mu, args.lambda).map_err(|e| usage(e.to_string()))?)
    } else {
        None
    };
    let op = Op::from_cli(&args.op, lame).map_err(|e| usage(e.to_string()))?;
    let points = args
        .points
        .iter()
        .map(|p| parse_point(p).map_err(|e| usage(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let field = eval_field(&args)?;
    let ops = Operators::new(field.chart().clone(), config).map_err(|e| usage(e.to_string()))?;
    let applied = ops.apply(&field, op).map_err(|e| usage(e.to_string()))?;
    for p in &points {
        let q = applied.at(p).map_err(|e| {
            failed(format!(
                "cannot evaluate `{}` at point {},{},{}: {e}",
                args.op, p[0], p[1], p[2]
            ))
        })?;
        let line = json!({
            "op": args.op,
            "point": p.to_vec(),
            "scalar": complex_json(q.s),
            "vector": q.v.iter().map(|c| complex_json(*c)).collect::<Vec<_>>(),
        });
        println!("{line}");
    }
    Ok(ExitCode::SUCCESS)
}

fn run_charts(args: ChartsArgs) -> Result<ExitCode, Failure> {
    let names: Vec<&str> = match &args.name {
        Some(n) => vec![n.as_str()],
        None => BUILTIN_CHARTS.to_vec(),
    };
    for name in names {
        let chart = load_chart(name)?;
        println!("{chart}");
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => run_verify(a),
        Command::Eval(a) => run_eval(a),
        Command::Charts(a) => run_charts(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
