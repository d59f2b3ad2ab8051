use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use dml_core::arith::rational::{format_rational, parse_rational};
use dml_core::bounds::{standard_deltas, verify_prop21_derivation, verify_theorem_arithmetic, BoundReport};
use dml_core::heights::{height_point, height_power, log_height_vector};
use dml_core::index::index;
use dml_core::recurrence::{
    multiplicity_count, solve_unit_equation, ternary_zero_count, BinaryRecurrence, TernaryRecurrence,
    UnitEquationProblem,
};
use dml_core::roth::{check_roth_instance, RothInstance, Verdict};
use dml_core::subspace::{
    check_exponent_system, cluster_into_lines, precondition_holds, prop21_line_bound, satisfies_system, scan_box,
    SubspaceQuery,
};
use dml_core::{Error, FieldElement, Rational};
use serde_json::{json, Value};

use crate::problem::{parse_problem_file, parse_range, ParseError, ProblemFile, RecurrenceProblem};
use crate::render::{self, to_record, SCHEMA};

/// Range scanned by `recur solve` when neither the file nor the flags give one.
pub const DEFAULT_RANGE: (i64, i64) = (-50, 50);

#[derive(Debug, Parser)]
#[command(name = "dml", version, about = "Certified height, index and counting computations")]
pub struct Cli {
    /// Emit machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    pub json: bool,

    /// Enclosure precision in bits; comparisons escalate from here.
    #[arg(long, global = true, env = "DML_BITS", default_value_t = 128, value_parser = clap::value_parser!(u32).range(8..=65536))]
    pub bits: u32,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weil height of a projective point.
    Height { file: PathBuf },
    /// Index of a multihomogeneous polynomial at a point.
    Index { file: PathBuf },
    /// Roth's Lemma instances.
    #[command(subcommand)]
    Roth(RothCommand),
    /// Exponent systems for two-variable linear forms.
    #[command(subcommand)]
    Subspace(SubspaceCommand),
    /// Explicit constants in the counting bounds.
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Unit equations and recurrences.
    #[command(subcommand)]
    Recur(RecurCommand),
}

#[derive(Debug, Subcommand)]
pub enum RothCommand {
    /// Check hypotheses and conclusion of an instance.
    Check { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum SubspaceCommand {
    /// Check an exponent system, optionally test points or scan a box.
    Check { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum BoundsCommand {
    /// Verify the derivation for each delta and the final arithmetic.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Optional `kind: bounds` file listing deltas.
    pub file: Option<PathBuf>,
    /// A delta in (0, 1), as p/q. Repeatable.
    #[arg(long = "delta")]
    pub deltas: Vec<String>,
    /// The standard grid of deltas.
    #[arg(long, conflicts_with = "deltas")]
    pub all: bool,
}

#[derive(Debug, Subcommand)]
pub enum RecurCommand {
    /// Solve a unit equation or count values of a recurrence.
    Solve(SolveArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub file: PathBuf,
    /// Value to count (binary recurrences); overrides the file.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Index range lo:hi; overrides the file.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Negative,
    Indeterminate,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Negative => 1,
            Status::Indeterminate => 3,
        }
    }

    fn worst(self, other: Status) -> Status {
        match (self, other) {
            (Status::Indeterminate, _) | (_, Status::Indeterminate) => Status::Indeterminate,
            (Status::Negative, _) | (_, Status::Negative) => Status::Negative,
            _ => Status::Ok,
        }
    }

    fn of(v: Verdict) -> Status {
        match v {
            Verdict::Holds => Status::Ok,
            Verdict::Fails => Status::Negative,
            Verdict::Indeterminate => Status::Indeterminate,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Negative => "negative",
            Status::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    Input(String, Option<ParseError>),
    Core(Error),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Input(..) => 2,
            Failure::Core(Error::Hypothesis(_)) => 1,
            Failure::Core(Error::Indeterminate { .. }) => 3,
            Failure::Core(_) => 2,
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Input(m, _) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Input(..) => "input",
            Failure::Core(Error::Hypothesis(_)) => "hypothesis",
            Failure::Core(Error::Indeterminate { .. }) => "indeterminate",
            Failure::Core(Error::Domain(_)) => "domain",
            Failure::Core(Error::FieldMismatch(_)) => "field_mismatch",
            Failure::Core(Error::Unsupported(_)) => "unsupported",
        }
    }

    pub fn record(&self, command: &str) -> Value {
        let mut err = json!({ "kind": self.kind(), "message": self.message() });
        if let Failure::Input(_, Some(p)) = self {
            err["line"] = json!(p.line);
            err["field"] = json!(p.field);
        }
        json!({ "schema": SCHEMA, "command": command, "status": "error", "error": err })
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Input(e.to_string(), Some(e))
    }
}

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into(), None)
}

pub struct Outcome {
    pub record: Value,
    pub status: Status,
}

fn outcome(command: &str, status: Status, body: Value) -> Outcome {
    let mut record = json!({ "schema": SCHEMA, "command": command, "status": status.label() });
    if let (Value::Object(r), Value::Object(b)) = (&mut record, body) {
        r.extend(b);
    }
    Outcome { record, status }
}

fn load(path: &Path, expected: &str) -> Result<ProblemFile, Failure> {
    let p = parse_problem_file(path)?;
    if p.kind() != expected {
        return Err(input(format!("{}: expected a `kind: {expected}` file, found `kind: {}`", path.display(), p.kind())));
    }
    Ok(p)
}

pub fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Height { .. } => "height",
        Command::Index { .. } => "index",
        Command::Roth(_) => "roth check",
        Command::Subspace(_) => "subspace check",
        Command::Bounds(_) => "bounds verify",
        Command::Recur(_) => "recur solve",
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let bits = cli.bits;
    let name = command_name(&cli.command);
    match &cli.command {
        Command::Height { file } => height(name, file, bits),
        Command::Index { file } => index_cmd(name, file),
        Command::Roth(RothCommand::Check { file }) => roth(name, file, bits),
        Command::Subspace(SubspaceCommand::Check { file }) => subspace(name, file, bits),
        Command::Bounds(BoundsCommand::Verify(args)) => bounds(name, args, bits),
        Command::Recur(RecurCommand::Solve(args)) => recur(name, args, bits),
    }
}

fn height(name: &str, file: &Path, bits: u32) -> Result<Outcome, Failure> {
    let ProblemFile::Height(p) = load(file, "height")? else { unreachable!() };
    let exact = height_power(p.point.coords())?;
    let body = json!({
        "point": p.point.to_string(),
        "field": p.point.field().to_string(),
        "height": to_record(&height_point(&p.point, bits)?),
        "log_height": to_record(&log_height_vector(p.point.coords(), bits)?),
        "height_power": { "k": exact.k, "value": format_rational(&exact.value) },
        "bits": bits,
    });
    Ok(outcome(name, Status::Ok, body))
}

fn index_cmd(name: &str, file: &Path) -> Result<Outcome, Failure> {
    let ProblemFile::Index(p) = load(file, "index")? else { unreachable!() };
    let i = index(&p.polynomial, &p.points)?;
    let body = json!({
        "m": p.polynomial.m(),
        "r": p.polynomial.multidegree(),
        "field": p.polynomial.field().to_string(),
        "points": p.points.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "index": i.to_string(),
    });
    Ok(outcome(name, Status::Ok, body))
}

fn roth(name: &str, file: &Path, bits: u32) -> Result<Outcome, Failure> {
    let ProblemFile::Roth(p) = load(file, "roth")? else { unreachable!() };
    let inst = RothInstance::new(p.theta, p.polynomial, p.forms)?;
    let rep = check_roth_instance(&inst, bits)?;
    let mut status = Status::of(rep.hypotheses);
    if rep.hypotheses == Verdict::Holds && !rep.conclusion_holds {
        status = Status::Negative;
    }
    Ok(outcome(name, status, json!({ "report": to_record(&rep) })))
}

fn subspace(name: &str, file: &Path, bits: u32) -> Result<Outcome, Failure> {
    let ProblemFile::Subspace(p) = load(file, "subspace")? else { unreachable!() };
    let check = check_exponent_system(&p.system);
    let mut status = if check.holds { Status::Ok } else { Status::Negative };
    let pre = precondition_holds(&p.q, &p.delta);
    let mut body = json!({
        "field": p.system.field().to_string(),
        "q": format_rational(&p.q),
        "delta": format_rational(&p.delta),
        "places": p.system.entries().iter().map(|e| json!({
            "place": e.place.to_string(),
            "forms": [format!("{:?}", e.forms[0]), format!("{:?}", e.forms[1])],
            "e": [format_rational(&e.e[0]), format_rational(&e.e[1])],
        })).collect::<Vec<_>>(),
        "exponent_check": to_record(&check),
        "precondition_q_gt_4_pow_delta": pre,
        "strict_printed_form": p.strict_printed_form,
    });
    if !pre {
        return Ok(outcome(name, Status::Negative, body));
    }
    let query = SubspaceQuery::new(p.system.clone(), p.q.clone(), p.delta.clone())?.strict(p.strict_printed_form);
    body["line_bound"] = to_record(&prop21_line_bound(&p.delta, bits)?);
    if !p.points.is_empty() {
        let mut hits = Vec::new();
        let mut rows = Vec::new();
        for x in &p.points {
            let ok = satisfies_system(x, &query, bits)?;
            if ok {
                hits.push(x.clone());
            }
            rows.push(json!({ "point": format!("({} : {})", x[0], x[1]), "satisfies": ok }));
        }
        body["points"] = json!(rows);
        body["lines"] = to_record(&cluster_into_lines(&hits)?);
    }
    if let Some(radius) = p.scan {
        if !(1..=5000).contains(&radius) {
            return Err(input("scan radius must lie in 1..=5000"));
        }
        let scan = scan_box(&query, radius, bits)?;
        if !scan.within_bound {
            status = status.worst(Status::Negative);
        }
        body["scan"] = to_record(&scan);
    }
    Ok(outcome(name, status, body))
}

fn bound_status(r: &BoundReport) -> Status {
    if r.indeterminate {
        Status::Indeterminate
    } else if r.all_hold {
        Status::Ok
    } else {
        Status::Negative
    }
}

fn bounds(name: &str, args: &VerifyArgs, bits: u32) -> Result<Outcome, Failure> {
    let mut deltas: Vec<Rational> = Vec::new();
    if let Some(f) = &args.file {
        let ProblemFile::Bounds(p) = load(f, "bounds")? else { unreachable!() };
        deltas.extend(p.deltas);
    }
    for d in &args.deltas {
        deltas.push(parse_rational(d).map_err(|e| input(format!("--delta {d}: {e}")))?);
    }
    if args.all || deltas.is_empty() {
        for d in standard_deltas() {
            if !deltas.contains(&d) {
                deltas.push(d);
            }
        }
    }
    let mut status = Status::Ok;
    let mut reports = Vec::new();
    for d in &deltas {
        let r = verify_prop21_derivation(d, bits)?;
        status = status.worst(bound_status(&r));
        reports.push(to_record(&r));
    }
    let theorem = verify_theorem_arithmetic(bits)?;
    status = status.worst(bound_status(&theorem));
    let body = json!({ "bits": bits, "derivations": reports, "theorem": to_record(&theorem) });
    Ok(outcome(name, status, body))
}

fn recur(name: &str, args: &SolveArgs, bits: u32) -> Result<Outcome, Failure> {
    let ProblemFile::Recurrence(p) = load(&args.file, "recurrence")? else { unreachable!() };
    let flag_range = match &args.range {
        Some(s) => Some(parse_range(s).map_err(|m| input(format!("--range: {m}")))?),
        None => None,
    };
    let flag_c = match &args.c {
        Some(s) => Some(FieldElement::rational(parse_rational(s).map_err(|e| input(format!("--c {s}: {e}")))?)),
        None => None,
    };
    match p {
        RecurrenceProblem::Unit { a, b, alpha, beta, m } => {
            if flag_c.is_some() || flag_range.is_some() {
                return Err(input("--c and --range apply to recurrences; unit equations take M from the file"));
            }
            let problem = UnitEquationProblem::new(a, b, alpha, beta)?;
            let rep = solve_unit_equation(&problem, m, bits)?;
            let mut status = if rep.count_within_bound { Status::Ok } else { Status::Negative };
            if rep.certificate.is_none() {
                status = status.worst(Status::Indeterminate);
            }
            let body = json!({
                "equation": "a*alpha^m + b*beta^m + 1 = 0",
                "problem": to_record(&problem),
                "report": to_record(&rep),
            });
            Ok(outcome(name, status, body))
        }
        RecurrenceProblem::Binary { nu1, nu0, u0, u1, c, range } => {
            let c = flag_c.or(c).ok_or_else(|| input("binary recurrence needs a value: give `c` in the file or --c"))?;
            let (lo, hi) = flag_range.or(range).unwrap_or(DEFAULT_RANGE);
            let r = BinaryRecurrence::new(nu1, nu0, u0, u1)?;
            let rep = multiplicity_count(&r, &c, lo, hi)?;
            let status = if rep.count_within_bound { Status::Ok } else { Status::Negative };
            Ok(outcome(name, status, json!({ "recurrence": to_record(&r), "report": to_record(&rep) })))
        }
        RecurrenceProblem::Ternary { mu, v, range } => {
            if flag_c.is_some() {
                return Err(input("ternary recurrences count zeros; --c is not accepted"));
            }
            let (lo, hi) = flag_range.or(range).unwrap_or(DEFAULT_RANGE);
            let t = TernaryRecurrence::new(mu, v)?;
            let rep = ternary_zero_count(&t, lo, hi)?;
            let status = if rep.count_within_bound { Status::Ok } else { Status::Negative };
            Ok(outcome(name, status, json!({ "recurrence": to_record(&t), "report": to_record(&rep) })))
        }
    }
}

/// Runs a parsed command line, returning the exit code and stdout/stderr text.
pub fn run(cli: &Cli) -> (i32, String, String) {
    let name = command_name(&cli.command);
    match execute(cli) {
        Ok(o) => {
            let out = if cli.json { render::json(&o.record) } else { render::table(&o.record) };
            (o.status.code(), out, String::new())
        }
        Err(f) => {
            let err = format!("dml {name}: {}\n", f.message());
            let out = if cli.json { render::json(&f.record(name)) } else { String::new() };
            (f.code(), out, err)
        }
    }
}
