//! Command-line front end.
//!
//! [`run`] parses arguments, writes to the given streams and returns the process exit
//! code: 0 on success, 2 on a usage or precondition error, 1 when verification fails.

use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Map, Value};

use crate::bounds::envelope_record;
use crate::closed_forms::{
    b_2k, b_2k_plus_j, b_dominant, f_at_least, g_two_full_fixed, m_closed, t_two_marked,
    u_two_marked_fixed, Regime,
};
use crate::combinatorics::binomial;
use crate::generalized::{
    distribution, k_partition_sum, k_total, m_formula_ii, m_formula_ii_recurrence, n_partition_sum,
    n_total, r_pie, r_recurrence, DistributionTable,
};
use crate::oracle::{
    enumerate_capped, enumerate_compositions, enumerate_exact_max, oracle_at_least_t_full,
    oracle_b, oracle_k, oracle_m, oracle_n, oracle_r, oracle_two_marked, Composition,
};
use crate::verify::{run_suite, Limits, Suite};
use crate::Count;

/// Largest `n` for which `enumerate` lists compositions.
pub const ENUMERATE_N_MAX: u64 = 18;

/// Largest number of configurations the oracle may be asked to visit from `count`.
pub const ORACLE_WORK_LIMIT: u64 = 1 << 27;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "binpack",
    version,
    about = "Exact counts of balls-into-bins configurations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute one quantity, e.g. `count M 8 5 4`.
    Count(CountArgs),
    /// List the compositions of n into l parts, one per line.
    Enumerate(EnumerateArgs),
    /// Check formulas and identities against brute force over a grid.
    Verify(VerifyArgs),
    /// Tabulate M(n, l, k) over l for fixed n and k.
    Distribution(DistributionArgs),
    /// Exact M(n, l, k) together with its analytic envelope.
    Bounds(BoundsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    #[value(name = "B")]
    B,
    #[value(name = "M")]
    M,
    #[value(name = "R")]
    R,
    #[value(name = "K")]
    K,
    #[value(name = "N")]
    N,
    #[value(name = "T")]
    T,
    #[value(name = "F")]
    F,
    #[value(name = "U")]
    U,
    #[value(name = "G")]
    G,
}

impl Quantity {
    pub fn tag(self) -> &'static str {
        match self {
            Quantity::B => "B",
            Quantity::M => "M",
            Quantity::R => "R",
            Quantity::K => "K",
            Quantity::N => "N",
            Quantity::T => "T",
            Quantity::F => "F",
            Quantity::U => "U",
            Quantity::G => "G",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Quantity::B => &["n", "k"],
            Quantity::M | Quantity::R => &["n", "l", "k"],
            Quantity::K => &["n", "l"],
            Quantity::N => &["l", "k"],
            Quantity::T => &["k", "j", "i"],
            Quantity::F => &["k", "j", "t"],
            Quantity::U => &["k", "j", "i", "l"],
            Quantity::G => &["k", "j", "l"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Auto,
    Closed,
    Pie,
    Recurrence,
    Oracle,
}

impl Method {
    fn tag(self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Closed => "closed_form",
            Method::Pie => "pie",
            Method::Recurrence => "recurrence",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Args)]
struct CountArgs {
    #[arg(value_enum, ignore_case = true)]
    quantity: Quantity,
    /// Parameters in the order the quantity expects.
    #[arg(required = true)]
    params: Vec<u64>,
    #[arg(long, value_enum, default_value = "auto")]
    method: Method,
    /// Print only the decimal value.
    #[arg(long)]
    plain: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EnumerateMode {
    ExactMax,
    AtmostMax,
    Unrestricted,
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    n: u64,
    l: u64,
    k: u64,
    #[arg(value_enum)]
    mode: EnumerateMode,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all", value_parser = parse_suite)]
    suite: Suite,
    #[arg(long, default_value_t = Limits::default().n_max)]
    n_max: u64,
    #[arg(long, default_value_t = Limits::default().l_max)]
    l_max: u64,
    #[arg(long, default_value_t = Limits::default().k_max)]
    k_max: u64,
    /// Worker threads; `BINPACK_JOBS` takes precedence.
    #[arg(long)]
    jobs: Option<usize>,
    /// Where the envelope containment CSV goes when the bounds suite runs.
    #[arg(long, default_value = "envelope_report.csv")]
    report: PathBuf,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct DistributionArgs {
    n: u64,
    k: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    n: u64,
    l: u64,
    k: u64,
}

/// A usage or precondition failure, reported as one line with exit code 2.
#[derive(Debug)]
struct Usage(String);

impl<E: Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Count(a) => cmd_count(a, out),
        Command::Enumerate(a) => cmd_enumerate(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Distribution(a) => cmd_distribution(a, out),
        Command::Bounds(a) => cmd_bounds(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

/// A computed value with the method that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub value: Count,
    pub method: &'static str,
}

/// Evaluates `quantity` at `params` (ordered as [`Quantity::param_names`]).
///
/// `Method::Auto` tries the closed form, then the inclusion-exclusion formula, then
/// the oracle.
pub fn evaluate(quantity: Quantity, params: &[u64], method: Method) -> Result<Evaluation, String> {
    let names = quantity.param_names();
    if params.len() != names.len() {
        return Err(format!(
            "{} expects {} parameters ({}), got {}",
            quantity.tag(),
            names.len(),
            names.join(" "),
            params.len()
        ));
    }
    check_positive(quantity, params)?;
    let attempt = |m: Method| -> Option<Result<Count, String>> {
        match m {
            Method::Closed => closed(quantity, params),
            Method::Pie => pie(quantity, params),
            Method::Recurrence => recurrence(quantity, params),
            Method::Oracle => Some(oracle(quantity, params)),
            Method::Auto => None,
        }
    };
    let wrap = |m: Method, v: Result<Count, String>| {
        v.map(|value| Evaluation {
            value,
            method: m.tag(),
        })
    };
    match method {
        Method::Auto => {
            let mut last_err = None;
            for m in [Method::Closed, Method::Pie, Method::Oracle] {
                match attempt(m) {
                    Some(Ok(v)) => return wrap(m, Ok(v)),
                    Some(Err(e)) => last_err = last_err.or(Some(e)),
                    None => {}
                }
            }
            Err(last_err.unwrap_or_else(|| format!("no method evaluates {}", quantity.tag())))
        }
        m => match attempt(m) {
            Some(v) => wrap(m, v),
            None => Err(format!(
                "{} has no {} evaluation; try --method auto",
                quantity.tag(),
                m.tag()
            )),
        },
    }
}

fn check_positive(quantity: Quantity, params: &[u64]) -> Result<(), String> {
    let must_be_positive: &[&str] = match quantity {
        Quantity::B => &["k"],
        Quantity::M => &["l", "k"],
        Quantity::K | Quantity::N => &["l"],
        _ => &[],
    };
    for (name, v) in quantity.param_names().iter().zip(params) {
        if *v == 0 && must_be_positive.contains(name) {
            return Err(format!("{} requires {name} >= 1", quantity.tag()));
        }
    }
    Ok(())
}

fn lib<T>(r: crate::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn closed(q: Quantity, p: &[u64]) -> Option<Result<Count, String>> {
    Some(match q {
        Quantity::B => {
            let (n, k) = (p[0], p[1]);
            match Regime::classify(n, k) {
                Regime::Trivial => Ok(Count::from(0u32)),
                Regime::Single => Ok(Count::from(1u32)),
                Regime::Dominant => lib(b_dominant(n, k)),
                Regime::Double => lib(b_2k(k)),
                Regime::DoublePlus { j } => lib(b_2k_plus_j(k, j)),
                Regime::General { .. } => return None,
            }
        }
        Quantity::M => Ok(m_closed(p[0], p[1], p[2])?),
        Quantity::R => return None,
        Quantity::K => Ok(k_total(p[0], p[1])),
        Quantity::N => Ok(n_total(p[0], p[1])),
        Quantity::T => lib(t_two_marked(p[0], p[1], p[2])),
        Quantity::F => lib(f_at_least(p[0], p[1], p[2])),
        Quantity::U => lib(u_two_marked_fixed(p[0], p[1], p[2], p[3])),
        Quantity::G => lib(g_two_full_fixed(p[0], p[1], p[2])),
    })
}

fn pie(q: Quantity, p: &[u64]) -> Option<Result<Count, String>> {
    Some(Ok(match q {
        Quantity::B => (1..=p[0]).map(|l| m_formula_ii(p[0], l, p[1])).sum(),
        Quantity::M => m_formula_ii(p[0], p[1], p[2]),
        Quantity::R => r_pie(p[0], p[1], p[2]),
        Quantity::K => k_partition_sum(p[0], p[1]),
        Quantity::N => n_partition_sum(p[0], p[1]),
        _ => return None,
    }))
}

fn recurrence(q: Quantity, p: &[u64]) -> Option<Result<Count, String>> {
    Some(Ok(match q {
        Quantity::B => (1..=p[0])
            .map(|l| m_formula_ii_recurrence(p[0], l, p[1]))
            .sum(),
        Quantity::M => m_formula_ii_recurrence(p[0], p[1], p[2]),
        Quantity::R => r_recurrence(p[0], p[1], p[2]),
        _ => return None,
    }))
}

/// Upper bound on the configurations the oracle visits for `q` at `p`.
fn oracle_work(q: Quantity, p: &[u64]) -> Count {
    let compositions = |n: u64| -> Count {
        if n == 0 {
            Count::from(1u32)
        } else {
            Count::from(1u32) << (n - 1)
        }
    };
    match q {
        Quantity::B => compositions(p[0]),
        Quantity::M | Quantity::K => binomial(p[0] as i64 - 1, p[1] as i64 - 1),
        Quantity::R => r_pie(p[0], p[1], p[2]),
        Quantity::N => Count::from(p[1]).pow(p[0].min(u32::MAX as u64) as u32),
        Quantity::T | Quantity::F | Quantity::U | Quantity::G => compositions(2 * p[0] + p[1]),
    }
}

fn oracle(q: Quantity, p: &[u64]) -> Result<Count, String> {
    let work = oracle_work(q, p);
    if work > Count::from(ORACLE_WORK_LIMIT) {
        return Err(format!(
            "oracle would visit up to {work} configurations (limit {ORACLE_WORK_LIMIT}); use another --method"
        ));
    }
    match q {
        Quantity::B => Ok(oracle_b(p[0], p[1])),
        Quantity::M => Ok(oracle_m(p[0], p[1], p[2])),
        Quantity::R => Ok(oracle_r(p[0], p[1], p[2])),
        Quantity::K => Ok(oracle_k(p[0], p[1])),
        Quantity::N => Ok(oracle_n(p[0], p[1])),
        Quantity::T => lib(oracle_two_marked(2 * p[0] + p[1], p[0], p[2], None)),
        Quantity::F => lib(oracle_at_least_t_full(2 * p[0] + p[1], p[0], p[2], None)),
        Quantity::U => lib(oracle_two_marked(2 * p[0] + p[1], p[0], p[2], Some(p[3]))),
        Quantity::G => lib(oracle_at_least_t_full(2 * p[0] + p[1], p[0], 2, Some(p[2]))),
    }
}

/// The JSON record printed by `count`: keys `quantity`, `params`, `value`, `method`.
pub fn result_record(quantity: Quantity, params: &[u64], eval: &Evaluation) -> Value {
    let mut named = Map::new();
    for (name, v) in quantity.param_names().iter().zip(params) {
        named.insert((*name).to_string(), json!(v));
    }
    json!({
        "quantity": quantity.tag(),
        "params": named,
        "value": eval.value.to_string(),
        "method": eval.method,
    })
}

fn cmd_count(a: CountArgs, out: &mut dyn Write) -> Result<i32, Usage> {
    let eval = evaluate(a.quantity, &a.params, a.method).map_err(Usage)?;
    if a.plain {
        writeln!(out, "{}", eval.value)?;
    } else {
        writeln!(out, "{}", result_record(a.quantity, &a.params, &eval))?;
    }
    Ok(EXIT_OK)
}

fn cmd_enumerate(a: EnumerateArgs, out: &mut dyn Write) -> Result<i32, Usage> {
    if a.n > ENUMERATE_N_MAX {
        return Err(Usage(format!(
            "enumerate lists at most n = {ENUMERATE_N_MAX} (got n = {}); use `binpack count` for larger n",
            a.n
        )));
    }
    let stream: Box<dyn Iterator<Item = Composition>> = match a.mode {
        EnumerateMode::ExactMax => Box::new(enumerate_exact_max(a.n, a.l, a.k)),
        EnumerateMode::AtmostMax => Box::new(enumerate_capped(a.n, a.l, a.k)),
        EnumerateMode::Unrestricted => Box::new(enumerate_compositions(a.n, a.l)),
    };
    let mut total: u64 = 0;
    for c in stream {
        writeln!(out, "{c}")?;
        total += 1;
    }
    writeln!(out, "total={total}")?;
    Ok(EXIT_OK)
}

fn jobs(flag: Option<usize>) -> Result<Option<usize>, Usage> {
    match std::env::var("BINPACK_JOBS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Usage(format!(
                "BINPACK_JOBS must be a positive integer (got '{v}')"
            ))),
        },
        Err(_) => match flag {
            Some(0) => Err(Usage("--jobs must be at least 1".into())),
            other => Ok(other),
        },
    }
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32, Usage> {
    let limits = Limits {
        n_max: a.n_max,
        l_max: a.l_max,
        k_max: a.k_max,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs(a.jobs)? {
        pool = pool.num_threads(n);
    }
    let report = pool.build()?.install(|| run_suite(a.suite, limits));
    for outcome in &report.outcomes {
        writeln!(out, "{outcome}")?;
    }
    if let Some(csv) = &report.bounds_csv {
        std::fs::write(&a.report, csv)
            .map_err(|e| Usage(format!("cannot write {}: {e}", a.report.display())))?;
        writeln!(out, "containment report written to {}", a.report.display())?;
    }
    let required: Vec<_> = report.outcomes.iter().filter(|o| o.required).collect();
    let passed = required.iter().filter(|o| o.passed()).count();
    writeln!(
        out,
        "{passed}/{} required properties passed",
        required.len()
    )?;
    Ok(if report.all_required_passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

/// Decimal rendering of `x` with `digits` significant digits.
pub fn format_significant(x: &BigRational, digits: usize) -> String {
    let v = x.to_f64().unwrap_or(f64::NAN);
    if v == 0.0 || !v.is_finite() {
        return v.to_string();
    }
    let magnitude = v.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

fn rational_string(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn distribution_csv(t: &DistributionTable) -> String {
    let mut s = format!(
        "# n={}\n# k={}\n# total={}\n# mean_bins={}\nl,count\n",
        t.n,
        t.k,
        t.total(),
        format_significant(&t.mean_bins, 12)
    );
    for (l, c) in t.support() {
        s.push_str(&format!("{l},{c}\n"));
    }
    s
}

pub fn distribution_json(t: &DistributionTable) -> Value {
    let rows: Vec<Value> = t
        .support()
        .map(|(l, c)| json!({ "l": l, "count": c.to_string() }))
        .collect();
    json!({
        "n": t.n,
        "k": t.k,
        "total": t.total().to_string(),
        "mean_bins": format_significant(&t.mean_bins, 12),
        "mean_bins_exact": rational_string(&t.mean_bins),
        "rows": rows,
    })
}

fn cmd_distribution(a: DistributionArgs, out: &mut dyn Write) -> Result<i32, Usage> {
    let table = distribution(a.n, a.k)?;
    let body = match a.format {
        Format::Csv => distribution_csv(&table),
        Format::Json => format!("{}\n", distribution_json(&table)),
    };
    match a.out {
        Some(path) => std::fs::write(&path, body)
            .map_err(|e| Usage(format!("cannot write {}: {e}", path.display())))?,
        None => out.write_all(body.as_bytes())?,
    }
    Ok(EXIT_OK)
}

fn cmd_bounds(a: BoundsArgs, out: &mut dyn Write) -> Result<i32, Usage> {
    let r = envelope_record(a.n, a.l, a.k)?;
    let record = json!({
        "quantity": "M",
        "params": { "n": r.n, "l": r.l, "k": r.k },
        "value": r.exact.to_string(),
        "method": Method::Pie.tag(),
        "exact": r.exact.to_string(),
        "interval": { "lower": r.interval.lower, "upper": r.interval.upper },
        "exact_applicable": r.interval.exact_applicable,
        "contained": r.contained,
    });
    writeln!(out, "{record}")?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(&ratio(1098, 185), 12), "5.93513513514");
        assert_eq!(format_significant(&ratio(1, 1), 12), "1.00000000000");
        assert_eq!(format_significant(&ratio(43901, 4781), 4), "9.182");
        assert_eq!(format_significant(&ratio(123456, 1), 3), "123456");
    }

    #[test]
    fn parameter_count_is_checked() {
        let e = evaluate(Quantity::U, &[1, 2], Method::Auto).unwrap_err();
        assert!(e.contains("k j i l"), "{e}");
    }

    #[test]
    fn help_goes_to_stdout_with_exit_0() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["binpack", "--help"], &mut out, &mut err), EXIT_OK);
        assert!(String::from_utf8(out).unwrap().contains("count"));
        assert_eq!(run(["binpack"], &mut Vec::new(), &mut err), EXIT_USAGE);
    }
}
