//! Command-line front end: `eval`, `audit` and `reproduce`.
//!
//! Exit codes: 0 success, 1 audit or reproduction failure, 2 usage or parse
//! error, 3 evaluation error.

pub mod dsl;
pub mod measure;
pub mod report;
pub mod reproduce;

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Map, Value};

use densitylab::audit::{audit_conjugate_pair, audit_functional, Axiom, FamilyKind, TestFamily};
use densitylab::densities::numeric::ratio;
use densitylab::densities::{DensityError, Mode, Schedule};
use densitylab::setkit::{checkpoints, member, Counter, GroundSet};

use crate::dsl::{parse_set_expr, DslError};
use crate::measure::parse_measure;
use crate::report::{EvalRecord, Reproduction};
use crate::reproduce::{Options, ReproduceError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EVAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "densitylab", version, about = "Densities of symbolic integer sets and audits of their axioms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate one functional on one set.
    Eval(EvalArgs),
    /// Check axioms of a functional over a test family.
    Audit(AuditArgs),
    /// Recompute a named result and compare it with its expected value.
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Upper,
    Lower,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Upper => Mode::Upper,
            ModeArg::Lower => Mode::Lower,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Ground {
    Pos,
    Nonneg,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub set: String,
    #[arg(long)]
    pub measure: String,
    #[arg(long, value_enum, default_value = "upper")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 9)]
    pub depth: u32,
    #[arg(long, default_value_t = 0.02)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long, value_enum, default_value = "pos")]
    pub ground: Ground,
    /// Write (checkpoint, prefix density) rows as CSV to this path.
    #[arg(long)]
    pub emit_curve: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    #[arg(long)]
    pub measure: String,
    #[arg(long, value_enum, default_value = "upper")]
    pub mode: ModeArg,
    #[arg(long, default_value = "standard")]
    pub family: String,
    /// Comma-separated axioms; defaults to f1..f5 and bounded for upper
    /// functionals, l1..l4 for lower ones.
    #[arg(long)]
    pub axioms: Option<String>,
    #[arg(long, default_value_t = 0.02)]
    pub tol: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 9)]
    pub depth: u32,
    /// Also run the conjugate-pair checks.
    #[arg(long)]
    pub pair: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    pub target: String,
    /// A rational, or `1/sqrt2` for the range target.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub h: Option<u64>,
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    pub bits: Option<Vec<u32>>,
    #[arg(long = "K")]
    pub big_k: Option<String>,
    #[arg(long)]
    pub modulus_depth: Option<usize>,
    #[arg(long)]
    pub set: Option<String>,
    #[arg(long, default_value_t = 0.02)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

/// What a command produced: exit code, report text and log text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn report(code: i32, stdout: String) -> Self {
        Outcome { code, stdout, stderr: String::new() }
    }

    fn error(code: i32, kind: &str, message: &str, extra: Map<String, Value>) -> Self {
        let body = report::error_json(kind, message, extra);
        Outcome { code, stdout: format!("{body}\n"), stderr: format!("error: {message}\n") }
    }
}

fn usage(message: impl std::fmt::Display) -> Outcome {
    Outcome::error(EXIT_USAGE, "UsageError", &message.to_string(), Map::new())
}

fn dsl_error(e: &DslError) -> Outcome {
    let mut extra = Map::new();
    extra.insert("position".into(), e.position().into());
    let kind = match e {
        DslError::Parse { expected, .. } => {
            extra.insert("expected".into(), json!(expected));
            "ParseError"
        }
        DslError::Domain { .. } => "DomainError",
    };
    Outcome::error(EXIT_USAGE, kind, &e.to_string(), extra)
}

fn eval_error(e: &DensityError) -> Outcome {
    let kind = match e {
        DensityError::Set(densitylab::setkit::SetError::EnumerationRequired { .. }) => "EnumerationRequired",
        DensityError::UndecidableResidue { .. } => "UndecidableResidue",
        DensityError::TailBoundUnreachable { .. } => "TailBoundUnreachable",
        DensityError::IotaNotExact(_) => "IotaNotExact",
        _ => "EvaluationError",
    };
    Outcome::error(EXIT_EVAL, kind, &e.to_string(), Map::new())
}

fn pretty(v: &Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("serializable"))
}

fn schedule(depth: u32, tol: f64) -> Result<Schedule, Outcome> {
    let sch = Schedule { depth, tolerance: tol, ..Schedule::default() };
    sch.validate().map_err(usage)?;
    Ok(sch)
}

fn run_eval(a: &EvalArgs) -> Outcome {
    let set = match parse_set_expr(&a.set) {
        Ok(e) => e,
        Err(e) => return dsl_error(&e),
    };
    let sch = match schedule(a.depth, a.tol) {
        Ok(s) => s,
        Err(o) => return o,
    };
    let counter = Arc::new(Counter::default());
    let f = match parse_measure(&a.measure, a.mode.into(), counter.clone()) {
        Ok(f) => f,
        Err(e) => return usage(e),
    };
    let start = Instant::now();
    let value = match f.eval(&set, &sch) {
        Ok(v) => v,
        Err(e) => return eval_error(&e),
    };
    let ground = match a.ground {
        Ground::Pos => "pos",
        Ground::Nonneg => "nonneg",
    };
    let mut stderr = String::new();
    if let Some(path) = &a.emit_curve {
        let cps = if value.checkpoints.is_empty() { checkpoints(&set, a.depth) } else { value.checkpoints.clone() };
        // on the nonnegative ground the prefix is [0, n]
        let zero = u32::from(a.ground == Ground::Nonneg && member(&set, &BigUint::from(0u32), GroundSet::Nonnegative));
        let shift = u32::from(a.ground == Ground::Nonneg);
        let points: Vec<(String, f64)> =
            cps.iter().filter_map(|n| counter.count_prefix(&set, n).ok().map(|c| (n.to_string(), ratio(&(c + zero), &(n + shift))))).collect();
        if let Err(e) = std::fs::write(path, report::curve_csv(&points)) {
            return Outcome::error(EXIT_EVAL, "IoError", &format!("cannot write {}: {e}", path.display()), Map::new());
        }
        stderr.push_str(&format!("wrote {} curve points to {}\n", points.len(), path.display()));
    }
    let record =
        EvalRecord { measure: f.name(), mode: f.mode().name(), set: &set.to_string(), ground, value: &value, duration_ms: start.elapsed().as_millis() };
    let stdout = match a.format {
        Format::Json => pretty(&report::eval_json(&record)),
        Format::Csv => report::eval_csv(&record),
    };
    Outcome { code: EXIT_OK, stdout, stderr }
}

fn run_audit(a: &AuditArgs) -> Outcome {
    let Some(kind) = FamilyKind::parse(&a.family) else {
        return usage(format!("unknown family {:?}; expected standard, periodic-only or theta-catalog", a.family));
    };
    let sch = match schedule(a.depth, a.tol) {
        Ok(s) => s,
        Err(o) => return o,
    };
    let f = match parse_measure(&a.measure, a.mode.into(), Arc::new(Counter::default())) {
        Ok(f) => f,
        Err(e) => return usage(e),
    };
    let axioms: Vec<Axiom> = match &a.axioms {
        Some(list) => match list.split(',').map(str::parse).collect::<Result<_, _>>() {
            Ok(v) => v,
            Err(e) => return usage(e),
        },
        None if f.mode().is_upper() => Axiom::UPPER.iter().copied().chain([Axiom::Bounded]).collect(),
        None => Axiom::LOWER.to_vec(),
    };
    let fam = TestFamily::new(kind, a.seed);
    let mut r = audit_functional(&f, &fam, &axioms, a.tol, &sch);
    if a.pair {
        r.axioms.extend(audit_conjugate_pair(&f, &fam, a.tol, &sch).axioms);
    }
    let code = if r.all_pass() { EXIT_OK } else { EXIT_FAIL };
    let stdout = match a.format {
        Format::Json => pretty(&report::audit_json(&r)),
        Format::Csv => report::audit_csv(&r),
    };
    let failed = r.failed();
    let stderr = if failed.is_empty() { String::new() } else { format!("failed: {}\n", failed.join(", ")) };
    Outcome { code, stdout, stderr }
}

fn run_reproduce(a: &ReproduceArgs) -> Outcome {
    let o = Options {
        alpha: a.alpha.clone(),
        k: a.k,
        h: a.h,
        depth: a.depth,
        bits: a.bits.clone(),
        big_k: a.big_k.clone(),
        modulus_depth: a.modulus_depth,
        set: a.set.clone(),
        tol: a.tol,
    };
    let r: Reproduction = match reproduce::reproduce(&a.target, &o) {
        Ok(r) => r,
        Err(e @ ReproduceError::UnknownTarget(_)) => return Outcome::error(EXIT_USAGE, "UnknownTarget", &e.to_string(), Map::new()),
        Err(ReproduceError::Usage(m)) => return usage(m),
        Err(ReproduceError::Eval(e)) => return eval_error(&e),
    };
    let code = if r.pass() { EXIT_OK } else { EXIT_FAIL };
    let stdout = match a.format {
        Format::Json => pretty(&report::reproduce_json(&r)),
        Format::Csv => report::reproduce_csv(&r),
    };
    Outcome::report(code, stdout)
}

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Eval(a) => run_eval(a),
        Command::Audit(a) => run_audit(a),
        Command::Reproduce(a) => run_reproduce(a),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome::report(code, text)
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            }
        }
    }
}

/// Caps the rayon pool at `DENSITYLAB_THREADS` when set.
pub fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("DENSITYLAB_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| format!("DENSITYLAB_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}
