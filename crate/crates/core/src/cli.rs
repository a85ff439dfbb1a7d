//! The `lbk` command line.
//!
//! Exit codes: 0 on success, 2 for malformed input and violated
//! preconditions, 1 for numeric failures (including a failed comparison).

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::engine::{self, EngineError};
use crate::exec::Execution;
use crate::kernels::{self, KernelError};
use crate::oracle::{self, Method, OracleError, OracleOptions};
use crate::periodic::{self, PeriodicError, PeriodicFunction};
use crate::poisson::{self, PoissonError};
use crate::pwpoly;
use crate::quad;
use crate::rational::{self, Rational};
use crate::report::{self, IdentityRow, IdentityTable};

pub const MAX_BLOCKS_ENV: &str = "LBK_MAX_BLOCKS";

#[derive(Debug, Parser)]
#[command(name = "lbk", version, about = "Closed-form sinc-type integrals of periodic functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the integral through the finite Parseval sum.
    Eval(IntegrandArgs),
    /// Evaluate the integral by truncated quadrature on the real line.
    Oracle(OracleArgs),
    /// Run both and compare.
    Compare(IntegrandArgs),
    /// Check compact-support Poisson summation at one shift.
    Poisson(PoissonArgs),
    /// Inspect a centered B-spline.
    Bspline(BsplineArgs),
    /// Reproduce reference tables.
    Table {
        #[arg(value_enum)]
        which: TableKind,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableKind {
    Identities,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
struct IntegrandArgs {
    /// sinc:k=<int>, jinc or j0, optionally followed by :dilate=<rational>
    #[arg(long)]
    kernel: String,
    /// Integrand over one period, in x
    #[arg(long, conflicts_with = "samples")]
    expr: Option<String>,
    /// CSV file of equispaced samples over one period (re or re,im per line)
    #[arg(long)]
    samples: Option<PathBuf>,
    #[arg(long, default_value = "1")]
    period: String,
    /// Comma-separated jump points inside [-T/2, T/2]
    #[arg(long, value_delimiter = ',')]
    jumps: Vec<String>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Disable the data-parallel block and node loops
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Plain,
    BlockAveraged,
    TailCorrected,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    input: IntegrandArgs,
    /// Truncation radius; chosen from the kernel when omitted
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
}

#[derive(Debug, Args)]
struct PoissonArgs {
    /// Kernel spec, as for eval
    #[arg(long)]
    kernel: String,
    /// Rational shift at which both sides are compared
    #[arg(long, default_value = "0")]
    xi: String,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Largest symmetric partial sum tried
    #[arg(long, default_value_t = 1 << 20)]
    max_terms: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct BsplineArgs {
    /// Order (the box is k = 1)
    #[arg(long)]
    k: u32,
    /// Include exact polynomial coefficients of every piece
    #[arg(long)]
    print_pieces: bool,
    /// Points at which to evaluate the one-sided limits
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    at: Vec<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Numeric(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Numeric(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<KernelError> for Failure {
    fn from(e: KernelError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<PeriodicError> for Failure {
    fn from(e: PeriodicError) -> Self {
        match e {
            PeriodicError::Quadrature(_) => Failure::Numeric(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Coefficient(p) => p.into(),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Block { .. } => Failure::Numeric(e.to_string()),
            OracleError::Engine(e) => e.into(),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<PoissonError> for Failure {
    fn from(e: PoissonError) -> Self {
        Failure::Input(e.to_string())
    }
}

fn parse_q(what: &str, text: &str) -> Result<Rational, Failure> {
    rational::parse_rational(text).map_err(|e| Failure::Input(format!("--{what}: {e}")))
}

fn load_integrand(args: &IntegrandArgs) -> Result<PeriodicFunction, Failure> {
    let period = parse_q("period", &args.period)?;
    let jumps = args
        .jumps
        .iter()
        .map(|j| parse_q("jumps", j))
        .collect::<Result<Vec<_>, _>>()?;
    match (&args.expr, &args.samples) {
        (Some(src), None) => {
            let expr = crate::expr::parse_expr(src)
                .map_err(|e| Failure::Input(format!("--expr: {e}")))?;
            Ok(PeriodicFunction::from_expr(expr, period, jumps)?)
        }
        (None, Some(path)) => {
            let file = File::open(path)
                .map_err(|e| Failure::Input(format!("cannot open {}: {e}", path.display())))?;
            let values = periodic::read_samples_csv(BufReader::new(file))?;
            if !jumps.is_empty() {
                return Err(Failure::Input("--jumps cannot be combined with --samples".into()));
            }
            Ok(PeriodicFunction::from_samples(values, period)?)
        }
        _ => Err(Failure::Input("exactly one of --expr and --samples is required".into())),
    }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn oracle_options(sequential: bool) -> Result<OracleOptions, Failure> {
    let max_blocks = match std::env::var(MAX_BLOCKS_ENV) {
        Ok(v) => Some(v.trim().parse::<usize>().ok().filter(|&n| n >= 3).ok_or_else(|| {
            Failure::Input(format!("{MAX_BLOCKS_ENV} must be an integer of at least 3, got `{v}`"))
        })?),
        Err(_) => None,
    };
    Ok(OracleOptions {
        execution: execution(sequential),
        max_blocks,
    })
}

fn render<T: Serialize>(value: &T, format: Format, csv: impl FnOnce() -> String, text: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Csv => csv(),
        Format::Text => text(),
    }
}

struct Output {
    body: String,
    failure: Option<Failure>,
}

impl Output {
    fn ok(body: String) -> Self {
        Output { body, failure: None }
    }
}

fn cmd_eval(args: &IntegrandArgs) -> Result<Output, Failure> {
    let p = load_integrand(args)?;
    let kernel = kernels::parse_kernel(&args.kernel)?;
    let r = engine::mixed_parseval_with(&p, &kernel, args.tol, execution(args.sequential))?;
    let json = report::EvaluationJson::from(&r);
    Ok(Output::ok(render(
        &json,
        args.format,
        || report::evaluation_csv(&json),
        || report::evaluation_text(&json),
    )))
}

fn cmd_oracle(args: &OracleArgs) -> Result<Output, Failure> {
    let input = &args.input;
    let p = load_integrand(input)?;
    let kernel = kernels::parse_kernel(&input.kernel)?;
    let tol = input.tol.min(periodic::MAX_COEFF_TOL);
    let (auto_method, auto_radius) = oracle::auto_settings(&p, &kernel, tol);
    let method = match args.method {
        MethodArg::Auto => auto_method,
        MethodArg::Plain => Method::Plain,
        MethodArg::BlockAveraged => Method::BlockAveraged,
        MethodArg::TailCorrected => Method::TailCorrected,
    };
    let radius = args.radius.unwrap_or(auto_radius);
    let options = oracle_options(input.sequential)?;
    let r = oracle::oracle_integral_with(&p, &kernel, radius, tol, method, options)?;
    let json = report::QuadratureJson::new(&r, true);
    Ok(Output::ok(render(
        &json,
        input.format,
        || report::quadrature_csv(&json),
        || report::quadrature_text(&json),
    )))
}

fn cmd_compare(args: &IntegrandArgs) -> Result<Output, Failure> {
    let p = load_integrand(args)?;
    let kernel = kernels::parse_kernel(&args.kernel)?;
    let options = oracle_options(args.sequential)?;
    let r = oracle::oracle_compare_with(&p, &kernel, args.tol, options)?;
    let json = report::CompareJson::from(&r);
    let body = render(
        &json,
        args.format,
        || report::compare_csv(&json),
        || report::compare_text(&json),
    );
    let failure = (!r.pass).then(|| {
        Failure::Numeric(format!(
            "engine and oracle differ by {:e}, above tolerance {:e}",
            r.difference, r.tolerance
        ))
    });
    Ok(Output { body, failure })
}

fn cmd_poisson(args: &PoissonArgs) -> Result<Output, Failure> {
    let kernel = kernels::parse_kernel(&args.kernel)?;
    let xi = parse_q("xi", &args.xi)?;
    let r = poisson::poisson_check(&kernel, &xi, args.tol, args.max_terms)?;
    let json = report::PoissonJson::from(&r);
    let body = render(
        &json,
        args.format,
        || report::poisson_csv(&json),
        || report::poisson_text(&json),
    );
    let failure = (!r.converged).then(|| {
        Failure::Numeric(format!("not converged within M = {} (spread {:e})", r.m, r.tail_estimate))
    });
    Ok(Output { body, failure })
}

fn cmd_bspline(args: &BsplineArgs) -> Result<Output, Failure> {
    let spline = pwpoly::bspline(args.k).map_err(|e| Failure::Input(e.to_string()))?;
    let at = args
        .at
        .iter()
        .map(|x| parse_q("at", x))
        .collect::<Result<Vec<_>, _>>()?;
    let json = report::BsplineJson::new(args.k, &spline, args.print_pieces, &at);
    Ok(Output::ok(render(
        &json,
        args.format,
        || report::bspline_csv(&json),
        || report::bspline_text(&json, &spline),
    )))
}

/// `∫_{-T/2}^{T/2} f - c ∫_{-T/2}^{T/2} f sin²(πx)` by one-period quadrature.
fn closed_form(p: &PeriodicFunction, c: f64) -> Result<f64, Failure> {
    let half = 0.5 * p.period_f64();
    let breaks = p.smoothness_breaks();
    let f = |x: f64| {
        let s = crate::bessel::sin_pi(x);
        p.eval(x) * (1.0 - c * s * s)
    };
    let r = quad::integrate_split(&f, -half, half, &breaks, 1e-14, quad::DEFAULT_MAX_PANELS)
        .map_err(|e| Failure::Numeric(e.to_string()))?;
    Ok(r.value.re)
}

struct IdentitySpec {
    identity: &'static str,
    k: u32,
    function: &'static str,
    integrand: PeriodicFunction,
    /// Weight `c` in the closed form.
    weight: f64,
    tolerance: f64,
}

/// `+1` on `|x| < 1/4`, `-1` on `1/4 < |x| < 1/2`.
pub fn even_square_wave() -> Result<PeriodicFunction, PeriodicError> {
    let quarter = rational::ratio(1, 4);
    periodic::parse_periodic(
        "(1/4 - abs(x)) / abs(1/4 - abs(x))",
        rational::int(1),
        Some(vec![-quarter.clone(), quarter]),
    )
}

fn identity_specs() -> Result<Vec<IdentitySpec>, Failure> {
    let one = || PeriodicFunction::constant(1.0, rational::int(1));
    let cos = || PeriodicFunction::cosine(1, rational::int(1));
    let mixed = || periodic::parse_periodic("x^2 + cos(2*pi*x)", rational::int(1), None);
    let spec = |identity, k, function, integrand, weight, tolerance| IdentitySpec {
        identity,
        k,
        function,
        integrand,
        weight,
        tolerance,
    };
    Ok(vec![
        spec("dirichlet", 1, "1", one()?, 0.0, 1e-3),
        spec("fejer", 2, "1", one()?, 0.0, 1e-5),
        spec("period-mean", 1, "x^2 + cos(2 pi x)", mixed()?, 0.0, 1e-3),
        spec("period-mean", 2, "x^2 + cos(2 pi x)", mixed()?, 0.0, 1e-6),
        spec("sinc-cubed", 3, "1", one()?, 0.5, 1e-6),
        spec("sinc-cubed", 3, "cos(2 pi x)", cos()?, 0.5, 1e-6),
        spec("sinc-fourth", 4, "1", one()?, 2.0 / 3.0, 1e-6),
        spec("sinc-fourth", 4, "square wave", PeriodicFunction::square_wave(rational::int(1))?, 2.0 / 3.0, 1e-6),
        spec("sinc-fourth", 4, "even square wave", even_square_wave()?, 2.0 / 3.0, 1e-6),
    ])
}

fn identity_table(options: OracleOptions) -> Result<IdentityTable, Failure> {
    let specs = identity_specs()?;
    let mut rows = Vec::with_capacity(specs.len());
    for s in specs {
        let kernel = kernels::kernel_bspline(s.k)?;
        let cmp = oracle::oracle_compare_with(&s.integrand, &kernel, s.tolerance, options)?;
        let closed = closed_form(&s.integrand, s.weight)?;
        let engine = cmp.engine.value.re;
        let closed_form_diff = (engine - closed).abs();
        rows.push(IdentityRow {
            identity: s.identity.to_string(),
            kernel: kernel.name(),
            function: s.function.to_string(),
            period: "1/1".to_string(),
            engine,
            oracle: cmp.oracle.value.re,
            closed_form: closed,
            diff: cmp.difference,
            closed_form_diff,
            tolerance: s.tolerance,
            pass: cmp.pass && closed_form_diff <= s.tolerance,
        });
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(IdentityTable { rows, pass })
}

fn cmd_table(format: Format) -> Result<Output, Failure> {
    let table = identity_table(oracle_options(false)?)?;
    let body = render(&table, format, || report::table_csv(&table), || report::table_text(&table));
    let failure = (!table.pass).then(|| Failure::Numeric("at least one identity row exceeds its tolerance".into()));
    Ok(Output { body, failure })
}

/// Runs the command line with explicit output streams; returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Poisson(a) => cmd_poisson(a),
        Command::Bspline(a) => cmd_bspline(a),
        Command::Table { which: TableKind::Identities, format } => cmd_table(*format),
    };
    match result {
        Ok(output) => {
            let _ = out.write_all(output.body.as_bytes());
            match output.failure {
                Some(f) => {
                    let _ = writeln!(err, "lbk: {}", f.message());
                    f.code()
                }
                None => 0,
            }
        }
        Err(f) => {
            let _ = writeln!(err, "lbk: {}", f.message());
            f.code()
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
