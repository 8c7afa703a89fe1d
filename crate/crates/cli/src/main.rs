use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use trigpow::check::{run_checks, CheckConfig, THREE_WAY_TOLERANCE};
use trigpow::closedform::binomial_derivative;
use trigpow::evaluator::{
    build_expression_with, default_step, evaluate, finite_difference, Exponent, Form,
};
use trigpow::families::{Family, Sequence, SequenceCache};
use trigpow::render::{render_expression, RenderFormat, RenderOptions};
use trigpow::triangle::{
    product_matrix_row, second_highest_coeffs_with, verify_triangle_with, RowSource,
};

/// Default ceiling on k; coefficient growth, not correctness, is the limit.
const DEFAULT_MAX_K: usize = 64;

/// Failure messages printed per check group.
const FAILURES_SHOWN: usize = 10;

#[derive(Parser)]
#[command(
    name = "trigpow",
    version,
    about = "Derivatives of powers of sin, cos, sinh and cosh"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the polynomial expression for the k-th derivative.
    Poly(PolyArgs),
    /// Evaluate the k-th derivative numerically.
    Eval(EvalArgs),
    /// Run the verification suite.
    Check(CheckArgs),
    /// Print the second-highest-coefficient triangle.
    Triangle(TriangleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Sin,
    Cos,
    Sinh,
    Cosh,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Sin => Family::Sin,
            FamilyArg::Cos => Family::Cos,
            FamilyArg::Sinh => Family::Sinh,
            FamilyArg::Cosh => Family::Cosh,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Intermediate,
    Final,
}

impl From<FormArg> for Form {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Intermediate => Form::Intermediate,
            FormArg::Final => Form::Final,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Latex,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputArg {
    Text,
    Json,
}

#[derive(Args)]
struct PolyArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "final")]
    form: FormArg,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Keep a negative leading coefficient inside the bracket.
    #[arg(long)]
    no_factor: bool,
    /// Allow k above 64.
    #[arg(long)]
    allow_large_k: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Final,
    Intermediate,
    Binomial,
    Fd,
    All,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Exponent: an integer, or a real number where the base is nonnegative.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_exponent)]
    n: Exponent,
    #[arg(long)]
    k: usize,
    /// Point as `RE` or `RE,IM`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
    x: Complex64,
    #[arg(long, value_enum, default_value = "final")]
    method: Method,
    /// Finite-difference step; chosen from k and pole distance by default.
    #[arg(long)]
    h: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputArg,
    #[arg(long)]
    allow_large_k: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 12)]
    max_k: usize,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(i64).range(0..))]
    max_n: i64,
    /// Relative tolerance for the three-way evaluation agreement.
    #[arg(long, default_value_t = THREE_WAY_TOLERANCE)]
    tolerance: f64,
    /// Adds random evaluation points drawn from this seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputArg,
    #[arg(long)]
    allow_large_k: bool,
    /// Corrupts a cached polynomial before running (exercises failure reporting).
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Args)]
struct TriangleArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    rows: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputArg,
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    s.parse()
}

fn parse_point(s: &str) -> Result<Complex64, String> {
    let parse = |p: &str| {
        p.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("invalid number `{p}` in point `{s}`"))
    };
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(parse(re)?, parse(im)?)),
        None => Ok(Complex64::new(parse(s)?, 0.0)),
    }
}

/// Outcome of one subcommand: exit code 0 (success), 1 (check failure or
/// domain error) or 2 (usage error).
struct CommandResult {
    exit_code: u8,
    stdout: String,
    stderr: String,
}

impl CommandResult {
    fn ok(stdout: String) -> Self {
        Self {
            exit_code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: u8, stderr: String) -> Self {
        Self {
            exit_code: code,
            stdout: String::new(),
            stderr,
        }
    }
}

fn check_k(k: usize, allow_large_k: bool) -> Result<(), CommandResult> {
    if k > DEFAULT_MAX_K && !allow_large_k {
        return Err(CommandResult::fail(
            2,
            format!("error: k = {k} exceeds {DEFAULT_MAX_K}; pass --allow-large-k to override\n"),
        ));
    }
    Ok(())
}

fn cmd_poly(args: &PolyArgs) -> CommandResult {
    if let Err(e) = check_k(args.k, args.allow_large_k) {
        return e;
    }
    let cache = SequenceCache::new();
    let expr = build_expression_with(&cache, args.family.into(), args.k, args.form.into());
    let format = match args.format {
        FormatArg::Text => RenderFormat::Text,
        FormatArg::Latex => RenderFormat::Latex,
        FormatArg::Json => RenderFormat::Json,
    };
    let opts = RenderOptions {
        format,
        factor_minus_one: !args.no_factor,
    };
    CommandResult::ok(format!("{}\n", render_expression(&expr, &opts)))
}

fn format_complex(z: Complex64) -> String {
    // adding 0.0 turns -0.0 into 0.0
    let z = Complex64::new(z.re + 0.0, z.im + 0.0);
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{} - {}i", z.re, -z.im)
    } else {
        format!("{} + {}i", z.re, z.im)
    }
}

#[derive(Serialize)]
struct EvalJson {
    family: &'static str,
    n: String,
    k: usize,
    x: [f64; 2],
    values: Vec<(String, [f64; 2])>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fd_deviation: Option<f64>,
}

fn relative_deviation(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

fn cmd_eval(args: &EvalArgs) -> CommandResult {
    if let Err(e) = check_k(args.k, args.allow_large_k) {
        return e;
    }
    let family: Family = args.family.into();
    let cache = SequenceCache::new();
    let n = args.n;
    let x = args.x;
    let k = args.k;

    let run = |method: Method| -> Result<Complex64, String> {
        match method {
            Method::Final | Method::Intermediate => {
                let form = if method == Method::Final {
                    Form::Final
                } else {
                    Form::Intermediate
                };
                let expr = build_expression_with(&cache, family, k, form);
                evaluate(&expr, n, x).map_err(|e| e.to_string())
            }
            Method::Binomial => match n {
                Exponent::Integer(n) => {
                    binomial_derivative(family, n, k as u32, x).map_err(|e| e.to_string())
                }
                Exponent::Real(r) => Err(format!(
                    "binomial closed form needs an integer n >= 0, got {r}"
                )),
            },
            Method::Fd => {
                if x.im != 0.0 {
                    return Err("finite differences need a real x".to_string());
                }
                let h = args.h.unwrap_or_else(|| default_step(family, n, k, x.re));
                finite_difference(family, n, k, x.re, h)
                    .map(Complex64::from)
                    .map_err(|e| e.to_string())
            }
            Method::All => unreachable!(),
        }
    };

    let mut values = Vec::new();
    let mut stderr = String::new();
    let (mut max_dev, mut fd_dev) = (None, None);
    if args.method == Method::All {
        let primary = match run(Method::Final) {
            Ok(v) => v,
            Err(e) => return CommandResult::fail(1, format!("error: {e}\n")),
        };
        values.push(("final", primary));
        for m in [Method::Intermediate, Method::Binomial, Method::Fd] {
            let name = match m {
                Method::Intermediate => "intermediate",
                Method::Binomial => "binomial",
                _ => "fd",
            };
            match run(m) {
                Ok(v) => values.push((name, v)),
                Err(e) => stderr.push_str(&format!("skipped {name}: {e}\n")),
            }
        }
        let exact: Vec<Complex64> = values
            .iter()
            .filter(|(m, _)| *m != "fd")
            .map(|(_, v)| *v)
            .collect();
        let mut dev: f64 = 0.0;
        for (i, a) in exact.iter().enumerate() {
            for b in &exact[i + 1..] {
                dev = dev.max(relative_deviation(*a, *b));
            }
        }
        max_dev = Some(dev);
        fd_dev = values
            .iter()
            .find(|(m, _)| *m == "fd")
            .map(|(_, v)| relative_deviation(primary, *v));
    } else {
        match run(args.method) {
            Ok(v) => values.push((method_name(args.method), v)),
            Err(e) => return CommandResult::fail(1, format!("error: {e}\n")),
        }
    }

    let stdout = match args.format {
        OutputArg::Json => {
            let doc = EvalJson {
                family: family.name(),
                n: n.to_string(),
                k,
                x: [x.re, x.im],
                values: values
                    .iter()
                    .map(|(m, v)| (m.to_string(), [v.re, v.im]))
                    .collect(),
                max_deviation: max_dev,
                fd_deviation: fd_dev,
            };
            format!("{}\n", serde_json::to_string(&doc).expect("serializable"))
        }
        OutputArg::Text => {
            let mut out = String::new();
            for (m, v) in &values {
                out.push_str(&format!("{m}: {}\n", format_complex(*v)));
            }
            if let Some(d) = max_dev {
                out.push_str(&format!("max_deviation: {d:e}\n"));
            }
            if let Some(d) = fd_dev {
                out.push_str(&format!("fd_deviation: {d:e}\n"));
            }
            out
        }
    };
    CommandResult {
        exit_code: 0,
        stdout,
        stderr,
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Final => "final",
        Method::Intermediate => "intermediate",
        Method::Binomial => "binomial",
        Method::Fd => "fd",
        Method::All => "all",
    }
}

fn cmd_check(args: &CheckArgs) -> CommandResult {
    if let Err(e) = check_k(args.max_k, args.allow_large_k) {
        return e;
    }
    let cache = SequenceCache::new();
    if args.inject_fault {
        cache.corrupt_entry_for_testing(Sequence::F, args.max_k.min(2));
    }
    let cfg = CheckConfig {
        max_k: args.max_k,
        max_n: args.max_n,
        tolerance: args.tolerance,
        seed: args.seed,
    };
    let report = run_checks(&cache, &cfg);
    let stdout = match args.format {
        OutputArg::Json => format!(
            "{}\n",
            serde_json::to_string(&report).expect("serializable")
        ),
        OutputArg::Text => format!("{report}\n"),
    };
    let mut stderr = String::new();
    for g in &report.groups {
        for f in g.failures.iter().take(FAILURES_SHOWN) {
            stderr.push_str(&format!("{}: {f}\n", g.name));
        }
        if g.failures.len() > FAILURES_SHOWN {
            stderr.push_str(&format!(
                "{}: ... {} more\n",
                g.name,
                g.failures.len() - FAILURES_SHOWN
            ));
        }
    }
    CommandResult {
        exit_code: if report.passed() { 0 } else { 1 },
        stdout,
        stderr,
    }
}

#[derive(Serialize)]
struct TriangleLine {
    k: usize,
    product: Vec<String>,
    extracted: Option<Vec<String>>,
    matches: bool,
}

#[derive(Serialize)]
struct TriangleJson {
    rows: Vec<TriangleLine>,
    notes: Vec<String>,
}

fn cmd_triangle(args: &TriangleArgs) -> CommandResult {
    let rows = args.rows as usize;
    let cache = SequenceCache::new();
    let mut lines = Vec::with_capacity(rows);
    for k in 1..=rows {
        let product: Vec<String> = product_matrix_row(k, RowSource::Computed)
            .expect("k >= 1")
            .entries
            .iter()
            .map(ToString::to_string)
            .collect();
        let (extracted, matches) = if k >= 2 {
            match second_highest_coeffs_with(&cache, k) {
                Ok(e) => {
                    let e: Vec<String> = e.iter().map(ToString::to_string).collect();
                    let m = e[..] == product[1..];
                    (Some(e), m)
                }
                Err(_) => (None, false),
            }
        } else {
            (None, true)
        };
        lines.push(TriangleLine {
            k,
            product,
            extracted,
            matches,
        });
    }
    let report = verify_triangle_with(&cache, rows);
    let notes: Vec<String> = report
        .display_discrepancies()
        .map(|d| {
            let engine: Vec<String> = d.engine.iter().map(ToString::to_string).collect();
            let shown: Vec<String> = d.displayed.iter().map(ToString::to_string).collect();
            format!(
                "printed row {} reads [{}]; exact product row is [{}]",
                d.k,
                shown.join(", "),
                engine.join(", ")
            )
        })
        .collect();
    let all_match = lines.iter().all(|l| l.matches);

    let stdout = match args.format {
        OutputArg::Json => {
            let doc = TriangleJson { rows: lines, notes };
            format!("{}\n", serde_json::to_string(&doc).expect("serializable"))
        }
        OutputArg::Text => {
            let mut out = String::new();
            for l in &lines {
                let product = format!("[{}]", l.product.join(", "));
                let extracted = match &l.extracted {
                    Some(e) => format!("[{}]", e.join(", ")),
                    None => "-".to_string(),
                };
                let flag = if l.matches { "" } else { "  MISMATCH" };
                out.push_str(&format!("{:>3}  {product:<40} {extracted}{flag}\n", l.k));
            }
            for note in &notes {
                out.push_str(&format!("note: {note}\n"));
            }
            out
        }
    };
    CommandResult {
        exit_code: if all_match { 0 } else { 1 },
        stdout,
        stderr: String::new(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Poly(a) => cmd_poly(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Check(a) => cmd_check(a),
        Command::Triangle(a) => cmd_triangle(a),
    };
    let _ = std::io::stdout().write_all(result.stdout.as_bytes());
    let _ = std::io::stderr().write_all(result.stderr.as_bytes());
    ExitCode::from(result.exit_code)
}
