//! Command-line front end for the `ostrowski` library.
//!
//! [`run`] takes the full argument vector (program name first) and returns the exit code together
//! with everything that would be written to standard output and standard error, so the binary is
//! a thin wrapper and tests can drive commands in process.
//!
//! Exit codes: `0` success, `1` a violation was found under `--strict`, `2` invalid input.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use ostrowski::bounds::{evaluate_bound, BoundReport, InequalityId};
use ostrowski::means::{case_report, CaseId, MeansCase};
use ostrowski::quadrature::{
    adaptive_integrate, composite, convergence_table, observed_orders, reference_value, Partition,
    QuadratureResult, Xi, XiRule,
};
use ostrowski::verify::{audit_proof_steps, run_suite, ProofStepAudit, Suite, SuiteReport};
use ostrowski::{CorrectionMode, Execution, Interval, Registry, TestFunction, Weight};

#[derive(Debug, Parser)]
#[command(
    name = "ostrowski",
    version,
    about = "Ostrowski-type bounds, quadrature and audits"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Exit with status 1 when any reported inequality is violated.
    #[arg(long, global = true)]
    strict: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Registered functions and weights.
    List,
    /// Evaluate one inequality.
    Check(CheckArgs),
    /// Composite (`--n`) or adaptive (`--tol`) weighted quadrature.
    Integrate(IntegrateArgs),
    /// Uniform-refinement convergence table.
    Converge(ConvergeArgs),
    /// Exact vs claimed values of the intermediate proof steps.
    Audit(AuditArgs),
    /// Randomized validity suite.
    Verify(VerifyArgs),
    /// Closed-form special-means case.
    Means(MeansArgs),
}

#[derive(Debug, Args)]
struct Setting {
    #[arg(long)]
    function: String,
    #[arg(long)]
    weight: String,
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    /// Exponent for `pow_p_half`.
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
}

impl Setting {
    fn resolve(&self) -> ostrowski::Result<(TestFunction, &'static Weight, Interval)> {
        let reg = Registry::standard();
        let f = reg.resolve_function(&self.function, self.p)?;
        let w = reg.weight(&self.weight)?;
        let iv = Interval::new(self.a, self.b)?;
        Ok((f, w, iv))
    }
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Inequality id, e.g. `2.6` or `UNWEIGHTED_2_6`.
    #[arg(long)]
    ineq: String,
    #[command(flatten)]
    setting: Setting,
    /// Evaluation point; defaults to the midpoint.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    #[arg(long, default_value = "paper")]
    mode: CorrectionMode,
}

#[derive(Debug, Args)]
#[group(id = "size", required = true, multiple = false, args = ["n", "tol"])]
struct IntegrateArgs {
    #[command(flatten)]
    setting: Setting,
    /// Number of uniform subintervals.
    #[arg(long)]
    n: Option<usize>,
    /// Target for the summed a priori bound (adaptive, midpoint points).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value = "midpoint", conflicts_with = "tol")]
    xi: XiRule,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "paper")]
    mode: CorrectionMode,
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    #[command(flatten)]
    setting: Setting,
    #[arg(long, value_delimiter = ',', required = true)]
    ns: Vec<usize>,
    #[arg(long, default_value = "paper")]
    mode: CorrectionMode,
}

#[derive(Debug, Args)]
struct AuditArgs {
    #[command(flatten)]
    setting: Setting,
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    suite: Suite,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Args)]
struct MeansArgs {
    #[arg(long)]
    case: CaseId,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
}

/// One row of a `converge` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub estimate: f64,
    pub reference: Option<f64>,
    pub error: Option<f64>,
    pub bound: f64,
    /// `log2(e_prev / e)` against the previous row.
    pub order: Option<f64>,
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn fail(msg: impl std::fmt::Display) -> Self {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

enum Output {
    Listing(ostrowski::funcspace::RegistryListing),
    Report(BoundReport),
    Quadrature(QuadratureResult),
    Table(Vec<ConvergenceRow>),
    Audit(Vec<ProofStepAudit>),
    Suite(SuiteReport),
}

impl Output {
    fn violated(&self) -> bool {
        match self {
            Output::Report(r) => !r.holds,
            Output::Suite(s) => s.total_violations() > 0,
            _ => false,
        }
    }
}

/// Run one invocation. `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let out = match execute(cli.command) {
        Ok(o) => o,
        Err(e) => return Outcome::fail(e),
    };
    let stdout = match cli.format {
        Format::Json => to_json(&out).map_err(|e| e.to_string()),
        Format::Csv => to_csv(&out).map_err(|e| e.to_string()),
    };
    match stdout {
        Ok(stdout) => Outcome {
            code: if cli.strict && out.violated() { 1 } else { 0 },
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome::fail(e),
    }
}

fn execute(cmd: Command) -> ostrowski::Result<Output> {
    Ok(match cmd {
        Command::List => Output::Listing(Registry::standard().list()),
        Command::Check(c) => {
            let ineq: InequalityId = c.ineq.parse()?;
            let (f, w, iv) = c.setting.resolve()?;
            let x = c.x.unwrap_or(iv.midpoint());
            Output::Report(evaluate_bound(ineq, &f, w, iv, x, c.mode)?)
        }
        Command::Integrate(c) => {
            let (f, w, iv) = c.setting.resolve()?;
            let r = match (c.n, c.tol) {
                (Some(n), _) => {
                    let part = Partition::uniform(iv, n)?;
                    let xi = Xi::from_rule(&part, c.xi, c.seed);
                    composite(&f, w, &part, &xi, c.mode, Execution::default())?
                        .with_reference(reference_value(&f, w, iv)?)
                }
                (None, Some(tol)) => adaptive_integrate(&f, w, iv.a, iv.b, tol, c.mode)?,
                (None, None) => unreachable!("clap enforces --n or --tol"),
            };
            Output::Quadrature(r)
        }
        Command::Converge(c) => {
            let (f, w, iv) = c.setting.resolve()?;
            let rows = convergence_table(&f, w, iv, &c.ns, c.mode, Execution::default())?;
            let orders = std::iter::once(None).chain(observed_orders(&rows));
            Output::Table(
                rows.into_iter()
                    .zip(orders)
                    .map(|(r, order)| ConvergenceRow {
                        n: r.n,
                        estimate: r.estimate,
                        reference: r.reference,
                        error: r.actual_error,
                        bound: r.bound,
                        order,
                    })
                    .collect(),
            )
        }
        Command::Audit(c) => {
            let (f, w, iv) = c.setting.resolve()?;
            Output::Audit(audit_proof_steps(&f, w, iv, c.x)?)
        }
        Command::Verify(c) => {
            Output::Suite(run_suite(c.suite, c.samples, c.seed, Execution::default())?)
        }
        Command::Means(c) => {
            let mut case = MeansCase::new(c.case, c.a, c.b);
            case.x = c.x;
            case.p = c.p;
            Output::Report(case_report(&case)?)
        }
    })
}

/// Round to 9 significant digits.
pub fn round9(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.8e}").parse().unwrap_or(v)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n
                .as_f64()
                .map(round9)
                .and_then(serde_json::Number::from_f64)
            {
                *n = r;
            }
        }
        Value::Array(xs) => xs.iter_mut().for_each(round_value),
        Value::Object(m) => m.values_mut().for_each(round_value),
        _ => {}
    }
}

fn json<T: Serialize>(t: &T) -> Result<String, serde_json::Error> {
    let mut v = serde_json::to_value(t)?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

fn to_json(out: &Output) -> Result<String, serde_json::Error> {
    match out {
        Output::Listing(l) => json(l),
        Output::Report(r) => json(r),
        Output::Quadrature(q) => json(q),
        Output::Table(t) => json(t),
        Output::Audit(a) => json(a),
        Output::Suite(s) => json(s),
    }
}

fn num(v: f64) -> String {
    if v.is_finite() {
        round9(v).to_string()
    } else {
        String::new()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

const REPORT_HEADER: [&str; 12] = [
    "inequality",
    "lhs",
    "rhs",
    "margin",
    "holds",
    "ratio",
    "function",
    "weight",
    "a",
    "b",
    "x",
    "mode",
];

fn report_row(r: &BoundReport) -> Vec<String> {
    vec![
        r.inequality.clone(),
        num(r.lhs),
        num(r.rhs),
        num(r.margin),
        r.holds.to_string(),
        opt(r.ratio),
        r.function.clone(),
        r.weight.clone(),
        num(r.a),
        num(r.b),
        opt(r.x),
        r.mode.to_string(),
    ]
}

fn to_csv(out: &Output) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match out {
        Output::Listing(l) => {
            w.write_record(["kind", "id", "domain", "description"])?;
            for (kind, entries) in [("function", &l.functions), ("weight", &l.weights)] {
                for e in entries {
                    w.write_record([kind, &e.id, &e.domain, &e.description])?;
                }
            }
        }
        Output::Report(r) => {
            w.write_record(REPORT_HEADER)?;
            w.write_record(report_row(r))?;
        }
        Output::Quadrature(q) => {
            w.write_record(["n", "estimate", "reference", "error", "bound"])?;
            w.write_record([
                q.n.to_string(),
                num(q.estimate),
                opt(q.reference),
                opt(q.actual_error),
                num(q.bound),
            ])?;
        }
        Output::Table(rows) => {
            w.write_record(["n", "estimate", "reference", "error", "bound", "order"])?;
            for r in rows {
                w.write_record([
                    r.n.to_string(),
                    num(r.estimate),
                    opt(r.reference),
                    opt(r.error),
                    num(r.bound),
                    opt(r.order),
                ])?;
            }
        }
        Output::Audit(steps) => {
            w.write_record(["step", "lhs_value", "rhs_value", "discrepancy"])?;
            for s in steps {
                let step = serde_json::to_value(s.step)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_owned))
                    .unwrap_or_default();
                w.write_record([step, num(s.lhs_value), num(s.rhs_value), num(s.discrepancy)])?;
            }
        }
        Output::Suite(s) => {
            let mut header = vec!["suite", "seed", "sample"];
            header.extend(REPORT_HEADER);
            w.write_record(header)?;
            for e in &s.log {
                let mut row = vec![
                    s.suite.to_string(),
                    s.seed.to_string(),
                    e.sample.to_string(),
                ];
                row.extend(report_row(&e.report));
                w.write_record(row)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
