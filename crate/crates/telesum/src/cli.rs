//! The `telesum` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use telesum_core::arith::Rational;
use telesum_core::expr::{evaluate, DefiniteSum, Env, EvalError, Expr};
use telesum_core::pipeline::{self, ClosedForm, Config, PipelineError, VerifyPoint, VerifyReport, ORACLE_BUDGET};

use crate::parse::{parse, parse_expr, ParseError};
use crate::{json as js, render};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNSOLVED: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

/// Environment variable overriding the per-point oracle budget.
pub const BUDGET_VAR: &str = "TELESUM_ORACLE_BUDGET";

#[derive(Parser, Debug)]
#[command(name = "telesum", version, about = "Simplify definite nested sums into closed forms")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Json,
}

#[derive(Args, Debug)]
struct Input {
    /// Expression file, or a JSON array of expressions.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "plain")]
    format: Format,
}

#[derive(Args, Debug)]
struct Tuning {
    /// Largest recurrence order tried by creative telescoping.
    #[arg(long, value_name = "D", default_value_t = 5)]
    max_order: usize,
    /// Largest weight of sums rewritten into the algebraic basis.
    #[arg(long, value_name = "W", default_value_t = 4)]
    weight_cap: u32,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Find a closed form, optionally checking it against the oracle.
    Simplify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        tuning: Tuning,
        #[arg(long, value_name = "A..B", value_parser = parse_range)]
        verify: Option<(i64, i64)>,
        /// Write the simplification trace as JSON.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
    },
    /// Evaluate the sum by brute force.
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "N", allow_hyphen_values = true)]
        at: i64,
    },
    /// Compare a closed form (given, or found by simplify) with the oracle.
    Verify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        tuning: Tuning,
        /// File holding the closed form to check.
        #[arg(long, value_name = "FILE")]
        closed: Option<PathBuf>,
        #[arg(long, value_name = "A..B", value_parser = parse_range)]
        verify: Option<(i64, i64)>,
    },
    /// Parse the input and print it back.
    ParseCheck {
        #[command(flatten)]
        input: Input,
    },
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, found {s:?}"))?;
    let a: i64 = a.trim().parse().map_err(|e| format!("bad range start: {e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("bad range end: {e}"))?;
    Ok((a, b))
}

/// Result of one batch entry: stdout text or JSON, stderr text, exit code.
struct Outcome {
    plain: String,
    json: Value,
    diag: String,
    code: i32,
    trace: Option<Value>,
}

impl Outcome {
    fn input_error(text: &str, e: &ParseError) -> Outcome {
        Outcome {
            plain: String::new(),
            json: json!({
                "status": "input-error",
                "error": { "span": { "start": e.span.start, "end": e.span.end }, "expected": e.expected, "found": e.found },
            }),
            diag: e.render(text),
            code: EXIT_INPUT,
            trace: None,
        }
    }

    fn message(status: &str, msg: String, code: i32) -> Outcome {
        Outcome { plain: String::new(), json: json!({ "status": status, "message": msg }), diag: format!("error: {msg}"), code, trace: None }
    }
}

/// Entries of an input file: a JSON array of strings, or the whole text.
fn entries(text: &str) -> Result<Vec<String>, String> {
    if text.trim_start().starts_with('[') {
        serde_json::from_str::<Vec<String>>(text).map_err(|e| format!("batch file is not a JSON array of strings: {e}"))
    } else {
        Ok(vec![text.to_string()])
    }
}

fn budget() -> Result<u64, String> {
    match std::env::var(BUDGET_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| format!("{BUDGET_VAR} must be a nonnegative integer, found {v:?}")),
        Err(_) => Ok(ORACLE_BUDGET),
    }
}

fn point_line(p: &VerifyPoint) -> String {
    let got = match &p.got {
        Ok(g) => g.to_string(),
        Err(e) => format!("error ({e})"),
    };
    format!("FAIL at N = {}: expected {}, got {}", p.n, p.expected, got)
}

fn report_lines(r: &VerifyReport, from: i64, to: i64) -> String {
    let mut out = String::new();
    match r.first_mismatch() {
        None if r.points.is_empty() && !r.skipped.is_empty() => {
            let _ = writeln!(out, "UNCHECKED {from}..{to} ({} skipped over budget)", r.skipped.len());
        }
        None => {
            let _ = write!(out, "PASS {from}..{to} ({} points", r.points.len());
            if !r.skipped.is_empty() {
                let _ = write!(out, ", {} skipped over budget", r.skipped.len());
            }
            out.push_str(")\n");
        }
        Some(p) => {
            out.push_str(&point_line(p));
            out.push('\n');
        }
    }
    out
}

fn unsolved(e: PipelineError) -> Outcome {
    let trace = e.trace().map(js::trace);
    let code = match e {
        PipelineError::Unsolved { .. } => EXIT_UNSOLVED,
        _ => EXIT_INPUT,
    };
    let msg = e.to_string();
    let status = if code == EXIT_UNSOLVED { "unsolved" } else { "input-error" };
    if code == EXIT_INPUT {
        return Outcome { trace, ..Outcome::message(status, msg, code) };
    }
    Outcome { plain: format!("{msg}\n"), json: json!({ "status": status, "message": msg }), diag: String::new(), code, trace }
}

fn simplify_entry(text: &str, cfg: &Config, range: Option<(i64, i64)>) -> Outcome {
    let s = match parse(text) {
        Ok(s) => s,
        Err(e) => return Outcome::input_error(text, &e),
    };
    match pipeline::simplify(&s, cfg) {
        Ok((cf, trace)) => {
            let mut plain = format!("{}\n# valid for {} >= {}\n", render::plain(&cf.expression), param_names(&cf), cf.valid_from);
            let mut json = json!({ "status": "solved", "input": render::plain(&s.to_expr()), "closed_form": js::closed_form(&cf) });
            let mut code = EXIT_OK;
            if let Some((a, b)) = range {
                let r = pipeline::verify(&cf, &s, a, b, cfg.oracle_budget);
                plain.push_str(&report_lines(&r, a, b));
                json["verify"] = js::report(&r, a, b);
                if !r.passed() {
                    code = EXIT_MISMATCH;
                }
            }
            Outcome { plain, json, diag: String::new(), code, trace: Some(js::trace(&trace)) }
        }
        Err(e) => unsolved(e),
    }
}

fn param_names(cf: &ClosedForm) -> String {
    match cf.params.as_slice() {
        [] => "N".into(),
        ps => ps.iter().map(|p| p.as_str()).collect::<Vec<_>>().join(","),
    }
}

fn oracle_entry(text: &str, n: i64, budget: u64) -> Outcome {
    let s = match parse(text) {
        Ok(s) => s,
        Err(e) => return Outcome::input_error(text, &e),
    };
    match pipeline::oracle(&s, n, budget) {
        Ok(v) => Outcome { plain: format!("{v}\n"), json: json!({ "status": "ok", "n": n.to_string(), "value": js::rational(&v) }), diag: String::new(), code: EXIT_OK, trace: None },
        Err(EvalError::Budget) => Outcome::message("budget-exceeded", format!("more than {budget} summand evaluations needed at {n}; raise {BUDGET_VAR}"), EXIT_UNSOLVED),
        Err(e) => Outcome::message("input-error", format!("cannot evaluate at {n}: {e}"), EXIT_INPUT),
    }
}

/// Exact comparison of a user-supplied closed form with the oracle.
fn verify_given(s: &DefiniteSum, closed: &Expr, from: i64, to: i64, budget: u64) -> VerifyReport {
    let params = s.params();
    let mut report = VerifyReport::default();
    for n in from..=to {
        match pipeline::oracle(s, n, budget) {
            Ok(expected) => {
                let env: Env = params.iter().chain(closed.free_vars().iter()).map(|p| (*p, n)).collect();
                let got = evaluate(closed, &env).map_err(|e| e.to_string());
                report.points.push(VerifyPoint { n, expected, got });
            }
            Err(_) => report.skipped.push(n),
        }
    }
    report
}

fn verify_entry(text: &str, closed: Option<&str>, cfg: &Config, range: Option<(i64, i64)>) -> Outcome {
    let s = match parse(text) {
        Ok(s) => s,
        Err(e) => return Outcome::input_error(text, &e),
    };
    let (report, a, b) = match closed {
        Some(c) => {
            let e = match parse_expr(c) {
                Ok(e) => e,
                Err(err) => return Outcome::input_error(c, &err),
            };
            let Some((a, b)) = range else {
                return Outcome::message("input-error", "--verify A..B is required with --closed".into(), EXIT_INPUT);
            };
            (verify_given(&s, &e, a, b, cfg.oracle_budget), a, b)
        }
        None => match pipeline::simplify(&s, cfg) {
            Ok((cf, _)) => {
                let (a, b) = range.unwrap_or((cf.valid_from, cf.valid_from + 28));
                (pipeline::verify(&cf, &s, a, b, cfg.oracle_budget), a, b)
            }
            Err(e) => return unsolved(e),
        },
    };
    let code = if report.passed() { EXIT_OK } else { EXIT_MISMATCH };
    Outcome { plain: report_lines(&report, a, b), json: js::report(&report, a, b), diag: String::new(), code, trace: None }
}

fn parse_check_entry(text: &str) -> Outcome {
    match parse(text) {
        Ok(s) => {
            let e = s.to_expr();
            Outcome { plain: format!("{}\n", render::plain(&e)), json: json!({ "status": "ok", "expression": js::expr(&e) }), diag: String::new(), code: EXIT_OK, trace: None }
        }
        Err(e) => Outcome::input_error(text, &e),
    }
}

/// Worst exit code wins: input error, then mismatch, then unsolved.
fn combine(codes: impl Iterator<Item = i32>) -> i32 {
    codes.max_by_key(|c| match *c {
        EXIT_INPUT => 3,
        EXIT_MISMATCH => 2,
        EXIT_UNSOLVED => 1,
        _ => 0,
    })
    .unwrap_or(EXIT_OK)
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

/// Runs the command line, writing to the given streams; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let budget = match budget() {
        Ok(b) => b,
        Err(m) => {
            let _ = writeln!(err, "error: {m}");
            return EXIT_INPUT;
        }
    };
    let input = match &cli.cmd {
        Cmd::Simplify { input, .. } | Cmd::Oracle { input, .. } | Cmd::Verify { input, .. } | Cmd::ParseCheck { input } => input,
    };
    let texts = match read(&input.input).and_then(|t| entries(&t)) {
        Ok(t) => t,
        Err(m) => {
            let _ = writeln!(err, "error: {m}");
            return EXIT_INPUT;
        }
    };
    let batch = texts.len() > 1 || read(&input.input).is_ok_and(|t| t.trim_start().starts_with('['));
    let format = input.format;
    let closed = match &cli.cmd {
        Cmd::Verify { closed: Some(p), .. } => match read(p) {
            Ok(c) => Some(c),
            Err(m) => {
                let _ = writeln!(err, "error: {m}");
                return EXIT_INPUT;
            }
        },
        _ => None,
    };
    let config = |t: &Tuning| Config { max_order: t.max_order, weight_cap: t.weight_cap, oracle_budget: budget, ..Config::default() };
    let outcomes: Vec<Outcome> = texts
        .par_iter()
        .map(|t| match &cli.cmd {
            Cmd::Simplify { tuning, verify, .. } => simplify_entry(t, &config(tuning), *verify),
            Cmd::Oracle { at, .. } => oracle_entry(t, *at, budget),
            Cmd::Verify { tuning, verify, .. } => verify_entry(t, closed.as_deref(), &config(tuning), *verify),
            Cmd::ParseCheck { .. } => parse_check_entry(t),
        })
        .collect();
    if let Cmd::Simplify { trace: Some(path), .. } = &cli.cmd {
        let traces: Vec<Value> = outcomes.iter().map(|o| o.trace.clone().unwrap_or(Value::Null)).collect();
        let doc = if batch { Value::Array(traces) } else { traces.into_iter().next().unwrap_or(Value::Null) };
        let text = serde_json::to_string_pretty(&doc).expect("values serialize") + "\n";
        if let Err(e) = std::fs::write(path, text) {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return EXIT_INPUT;
        }
    }
    match format {
        Format::Plain => {
            for (k, o) in outcomes.iter().enumerate() {
                if batch {
                    let _ = writeln!(out, "# [{k}]");
                }
                let _ = out.write_all(o.plain.as_bytes());
                if !o.diag.is_empty() {
                    let _ = writeln!(err, "{}", o.diag);
                }
            }
        }
        Format::Json => {
            let doc = if batch { Value::Array(outcomes.iter().map(|o| o.json.clone()).collect()) } else { outcomes[0].json.clone() };
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("values serialize"));
            for o in &outcomes {
                if !o.diag.is_empty() {
                    let _ = writeln!(err, "{}", o.diag);
                }
            }
        }
    }
    combine(outcomes.iter().map(|o| o.code))
}

/// Exact value of `e` with every free variable set to `n`.
pub fn eval_at(e: &Expr, n: i64) -> Result<Rational, EvalError> {
    let env: Env = e.free_vars().into_iter().map(|p| (p, n)).collect();
    evaluate(e, &env)
}
