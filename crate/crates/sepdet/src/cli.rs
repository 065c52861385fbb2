//! The `sepdet` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sepdet_core::functionals::{lip_local_sup, lip_modulus, slope_at, torus_sup, Domain, ScaleGrid};
use sepdet_core::harness::{Suite, SuiteConfig, SuiteReport};
use sepdet_core::scheme::{check_all, closure_iterate, dyadic_scales};
use sepdet_core::{
    ClosureConfig, DeterminacyCheck, ExtReal, FiniteSpace, FunctionOracle, GeneratedSubspace, Mode, PointId, PointSet,
    Tabulated, Truncation, Verdict, WitnessProblem,
};

use crate::descriptor::{find_point, load_function, load_problem, load_space, Family, FormatError, ProblemDescriptor};
use crate::parallel::{available_workers, run_suite_parallel};
use crate::pinned::{ParamArg, Pinned};

/// Upper end of the dyadic truncation used by `suite --q-density`.
pub const SUITE_DYADIC_BOUND: f64 = 64.0;

#[derive(Parser, Debug)]
#[command(name = "sepdet", version, about = "Witness closures and determinacy checks on finite metric spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Close a seed set under a witness problem and print the closure.
    Reduce(ClosureArgs),
    /// Close a seed set, then compare full and restricted optima at every
    /// point of the closure.
    Check(ClosureArgs),
    /// Slope of a function, on the whole space and on a torus-slope closure.
    Slope(PointArgs),
    /// Lipschitz modulus, on the whole space and on a ball-pair closure.
    Lip(PointArgs),
    /// Run a randomized property suite.
    Suite(SuiteArgs),
    /// Validate a space descriptor (and optionally a function or problem).
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Knobs {
    /// Witnesses may fall short of the optimum by at most this much.
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    /// At most this many witnesses per point and parameter.
    #[arg(long, default_value_t = 1)]
    pub cap: usize,
    /// At most this many closure rounds.
    #[arg(long, default_value_t = 10_000)]
    pub depth: usize,
    /// Use the dyadic scales k/2^m (m = this value) instead of the realized
    /// scales between consecutive distances.
    #[arg(long = "q-density", value_name = "M")]
    pub q_density: Option<u32>,
}

impl Knobs {
    fn closure(&self) -> Result<ClosureConfig> {
        if !(self.eps >= 0.0) {
            bail!("eps: must be a nonnegative number, got {}", self.eps);
        }
        Ok(ClosureConfig { eps: self.eps, cap: self.cap, max_depth: self.depth })
    }

    fn truncation(&self, hi: f64) -> Truncation {
        match self.q_density {
            Some(exponent) => Truncation::Dyadic { lo: 0.0, hi, exponent },
            None => Truncation::Realized,
        }
    }
}

#[derive(Args, Debug)]
pub struct ClosureArgs {
    /// Space descriptor (JSON).
    #[arg(long)]
    pub space: PathBuf,
    /// Function: a descriptor file or one of coord, neg-coord, abs, square, zero.
    #[arg(long = "fn", value_name = "FN")]
    pub function: String,
    /// Problem: a descriptor file or one of ball-pairs, torus-slope, punctured-ball.
    #[arg(long, default_value = "ball-pairs")]
    pub problem: String,
    /// Overrides the mode of the problem (sup or inf).
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    /// Seed points, by label or index, separated by commas.
    #[arg(long, value_delimiter = ',', required = true)]
    pub x: Vec<String>,
    /// Close and check at this parameter only: r, r,s or t,r,s.
    #[arg(long, allow_hyphen_values = true)]
    pub param: Option<ParamArg>,
    #[command(flatten)]
    pub knobs: Knobs,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PointArgs {
    #[arg(long)]
    pub space: PathBuf,
    #[arg(long = "fn", value_name = "FN")]
    pub function: String,
    /// Points to evaluate at (all points if omitted); they also seed the closure.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<String>,
    /// A single shell r,s (slope) or radius r (lip) instead of the full grid.
    #[arg(long, allow_hyphen_values = true)]
    pub param: Option<ParamArg>,
    #[command(flatten)]
    pub knobs: Knobs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    /// Suite identifier, e.g. thm-2.1.
    #[arg(long)]
    pub name: String,
    /// Space sizes, separated by commas (suite defaults if omitted).
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Number of instances (suite default if omitted).
    #[arg(long)]
    pub instances: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub knobs: Knobs,
    /// Worker threads (defaults to the available parallelism).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Write the JSON report here; the summary table then goes to standard
    /// output, otherwise to standard error.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long)]
    pub space: PathBuf,
    #[arg(long = "fn", value_name = "FN")]
    pub function: Option<String>,
    #[arg(long)]
    pub problem: Option<String>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "sup" => Ok(Mode::Sup),
        "inf" => Ok(Mode::Inf),
        _ => Err(format!("expected sup or inf, got {s:?}")),
    }
}

/// Whether every check in the emitted report passed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    fn from_ok(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// Parses `argv` and runs the command: exit code 0 when everything passed,
/// 1 when a check failed (the report is still written), 2 on bad input.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(Status::Pass) => 0,
        Ok(Status::Fail) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

pub fn run(command: Command) -> Result<Status> {
    match command {
        Command::Reduce(args) => closure_command(args, false),
        Command::Check(args) => closure_command(args, true),
        Command::Slope(args) => point_command(args, Quantity::Slope),
        Command::Lip(args) => point_command(args, Quantity::Lip),
        Command::Suite(args) => suite_command(args),
        Command::Validate(args) => validate_command(args),
    }
}

fn emit(report: &impl Serialize, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load_inputs(space: &Path, function: &str) -> Result<(FiniteSpace, Tabulated), FormatError> {
    let space = load_space(space)?;
    let f = load_function(function)?.build(&space)?;
    Ok((space, f))
}

fn seeds(space: &FiniteSpace, names: &[String]) -> Result<Vec<PointId>, FormatError> {
    if names.is_empty() {
        return Ok((0..space.len()).map(PointId).collect());
    }
    let mut ids = names.iter().map(|n| find_point(space, n)).collect::<Result<Vec<_>, _>>()?;
    ids.sort();
    ids.dedup();
    Ok(ids)
}

#[derive(Serialize)]
struct ClosureSummary {
    points: Vec<String>,
    level_sizes: Vec<usize>,
    depth: usize,
    fixed_point: bool,
}

impl ClosureSummary {
    fn new(space: &FiniteSpace, y: &GeneratedSubspace) -> Self {
        ClosureSummary {
            points: y.points().iter().map(|&p| space.label(p).to_string()).collect(),
            level_sizes: y.level_sizes(),
            depth: y.depth(),
            fixed_point: y.fixed_point,
        }
    }
}

#[derive(Serialize, Default)]
struct Tally {
    total: usize,
    passed: usize,
    failed: usize,
    skipped: usize,
    monotone_violations: usize,
}

#[derive(Serialize)]
struct ClosureReport {
    problem: ProblemDescriptor,
    seed: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    param: Option<String>,
    closure: ClosureSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<Tally>,
    #[serde(skip_serializing_if = "Option::is_none")]
    checks: Option<Vec<DeterminacyCheck>>,
}

fn closure_command(args: ClosureArgs, check: bool) -> Result<Status> {
    let (space, f) = load_inputs(&args.space, &args.function)?;
    let mut descriptor = load_problem(&args.problem)?;
    if let Some(mode) = args.mode {
        descriptor.mode = mode;
    }
    if args.knobs.q_density.is_some() {
        descriptor.truncation = args.knobs.truncation(space.diameter() + 1.0);
    }
    if let Some(p) = args.param {
        if p.is_shell() != (descriptor.family == Family::TorusSlope) {
            return Err(FormatError::invalid(
                "param",
                format!(
                    "{} takes {}",
                    descriptor.family.name(),
                    if p.is_shell() { "a radius r" } else { "a shell r,s or t,r,s" }
                ),
            )
            .into());
        }
    }
    let config = args.knobs.closure()?;
    let seed = seeds(&space, &args.x)?;
    let base = descriptor.build(&space, &f);
    let pinned = args.param.map(|param| Pinned { inner: &*base, param, f: &f });
    let problem: &dyn WitnessProblem = match &pinned {
        Some(p) => p,
        None => &*base,
    };
    let y = closure_iterate(problem, &seed, &config)?;
    let mut ok = y.fixed_point;
    let (summary, checks) = if check {
        let set = y.to_set();
        let checks = check_all(problem, &set, 0.0)?;
        let mut tally = Tally { total: checks.len(), ..Tally::default() };
        for c in &checks {
            match c.verdict {
                Verdict::Pass => tally.passed += 1,
                Verdict::Fail => tally.failed += 1,
                Verdict::SkippedEmptyRegion => tally.skipped += 1,
            }
            tally.monotone_violations += usize::from(!c.monotone);
        }
        ok &= tally.failed == 0 && tally.monotone_violations == 0;
        (Some(tally), Some(checks))
    } else {
        (None, None)
    };
    let report = ClosureReport {
        problem: descriptor,
        seed: seed.iter().map(|&p| space.label(p).to_string()).collect(),
        param: args.param.map(|p| p.to_string()),
        closure: ClosureSummary::new(&space, &y),
        summary,
        checks,
    };
    emit(&report, args.out.as_deref())?;
    Ok(Status::from_ok(ok))
}

#[derive(Clone, Copy)]
enum Quantity {
    Slope,
    Lip,
}

#[derive(Serialize)]
struct PointValue {
    x: String,
    full: Option<ExtReal>,
    restricted: Option<ExtReal>,
    /// Why a value is missing (an isolated point or an empty region).
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    agree: bool,
}

#[derive(Serialize)]
struct PointReport {
    quantity: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    param: Option<String>,
    closure: ClosureSummary,
    values: Vec<PointValue>,
}

fn point_command(args: PointArgs, quantity: Quantity) -> Result<Status> {
    let (space, f) = load_inputs(&args.space, &args.function)?;
    let n = space.len();
    let config = args.knobs.closure()?;
    let truncation = args.knobs.truncation(space.diameter() + 1.0);
    let targets = seeds(&space, &args.x)?;
    match (quantity, args.param) {
        (Quantity::Slope, Some(ParamArg::Radius(_))) => {
            return Err(FormatError::invalid("param", "slope takes a shell r,s").into())
        }
        (Quantity::Slope, Some(ParamArg::Shell { t: Some(_), .. })) => {
            return Err(FormatError::invalid("param", "slope uses t = f(x); pass r,s").into())
        }
        (Quantity::Lip, Some(ParamArg::Shell { .. })) => {
            return Err(FormatError::invalid("param", "lip takes a radius r").into())
        }
        _ => {}
    }
    let family = match quantity {
        Quantity::Slope => Family::TorusSlope,
        Quantity::Lip => Family::BallPairs,
    };
    let descriptor = ProblemDescriptor { truncation, ..ProblemDescriptor::new(family) };
    let base = descriptor.build(&space, &f);
    let pinned = args.param.map(|param| Pinned { inner: &*base, param, f: &f });
    let problem: &dyn WitnessProblem = match &pinned {
        Some(p) => p,
        None => &*base,
    };
    let y = closure_iterate(problem, &targets, &config)?;
    let set: PointSet = y.to_set();
    let full = Domain::full(&space, n);
    let restricted = Domain::restricted(&space, n, &set);
    let eval = |dom: Domain<'_>, x: PointId| -> Result<ExtReal, sepdet_core::Error> {
        let scales = match args.knobs.q_density {
            Some(m) => dyadic_scales(0.0, space.diameter() + 1.0, m),
            None => ScaleGrid::realized(&space, n, x).radii,
        };
        match (quantity, args.param) {
            (Quantity::Slope, Some(ParamArg::Shell { r, s, .. })) => torus_sup(&f, dom, x, f.eval(x), r, s),
            (Quantity::Slope, _) => slope_at(&f, dom, x, &shells(&scales)),
            (Quantity::Lip, Some(ParamArg::Radius(r))) => lip_local_sup(&f, dom, x, r).map(|l| l.value),
            (Quantity::Lip, _) => lip_modulus(&f, dom, x, &scales),
        }
    };
    let mut ok = y.fixed_point;
    let mut values = Vec::with_capacity(targets.len());
    for &x in &targets {
        let a = eval(full, x);
        let b = eval(restricted, x);
        let agree = a == b;
        ok &= agree;
        let note = match (&a, &b) {
            (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
            _ => None,
        };
        values.push(PointValue { x: space.label(x).to_string(), full: a.ok(), restricted: b.ok(), note, agree });
    }
    let report = PointReport {
        quantity: match quantity {
            Quantity::Slope => "slope",
            Quantity::Lip => "lip",
        },
        param: args.param.map(|p| p.to_string()),
        closure: ClosureSummary::new(&space, &y),
        values,
    };
    emit(&report, args.out.as_deref())?;
    Ok(Status::from_ok(ok))
}

fn shells(scales: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for (a, &r) in scales.iter().enumerate() {
        for &s in &scales[a + 1..] {
            out.push((r, s));
        }
    }
    out
}

pub fn suite_config(args: &SuiteArgs, suite: Suite) -> Result<SuiteConfig> {
    let mut config = SuiteConfig::new(suite);
    if !args.n.is_empty() {
        config.sizes = args.n.clone();
    }
    if let Some(instances) = args.instances {
        config.instances = instances;
    }
    config.seed = args.seed;
    config.closure = args.knobs.closure()?;
    config.truncation = args.knobs.truncation(SUITE_DYADIC_BOUND);
    config.validate()?;
    Ok(config)
}

fn suite_command(args: SuiteArgs) -> Result<Status> {
    let suite = Suite::parse(&args.name).map_err(|e| FormatError::invalid("name", e))?;
    let config = suite_config(&args, suite)?;
    let start = Instant::now();
    let report = run_suite_parallel(suite, &config, args.jobs.unwrap_or_else(available_workers))?;
    let elapsed = start.elapsed().as_secs_f64();
    emit(&report, args.out.as_deref())?;
    let table = summary_table(&report, elapsed);
    if args.out.is_some() {
        print!("{table}");
    } else {
        eprint!("{table}");
    }
    Ok(Status::from_ok(report.all_passed()))
}

/// A fixed-width summary of a suite run; the only place runtimes appear.
pub fn summary_table(report: &SuiteReport, seconds: f64) -> String {
    let c = &report.closure;
    format!(
        "{:<18} {:>9} {:>6} {:>6} {:>6} {:>10} {:>9} {:>8} {:>9} {:>9} {:>9}\n\
         {:<18} {:>9} {:>6} {:>6} {:>6} {:>10} {:>9} {:>8} {:>9.1} {:>9} {:>8.2}s\n",
        "suite",
        "instances",
        "pass",
        "fail",
        "skip",
        "checks",
        "monotone",
        "planted",
        "mean |Y|",
        "max |Y|",
        "runtime",
        report.suite.id(),
        report.instances,
        report.passed,
        report.failed,
        report.skipped,
        report.checks,
        report.monotone_violations,
        format!("{}/{}", report.planted_rejected, report.planted),
        c.mean_size,
        c.max_size,
        seconds,
    )
}

#[derive(Serialize)]
struct ValidateReport {
    points: usize,
    diameter: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    function: Option<Tabulated>,
    #[serde(skip_serializing_if = "Option::is_none")]
    problem: Option<ProblemDescriptor>,
}

fn validate_command(args: ValidateArgs) -> Result<Status> {
    let space = load_space(&args.space)?;
    let function = args.function.as_deref().map(|f| load_function(f)?.build(&space)).transpose()?;
    let problem = args.problem.as_deref().map(load_problem).transpose()?;
    emit(&ValidateReport { points: space.len(), diameter: space.diameter(), function, problem }, None)?;
    Ok(Status::Pass)
}
