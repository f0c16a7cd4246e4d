//! The `mechlab` command line.
//!
//! [`main_with`] parses arguments, runs one subcommand and returns the exit
//! status. Output goes to the writers it is given, so tests can capture it.
//!
//! Exit statuses: 0 clean, 1 findings (violations or ratios under the
//! declared floor), 2 bad input, 3 size guard, 4 mechanism not applicable.

mod render;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::audit::{
    self, lower_bound_probe, run_sweep, AuditError, AuditLimits, AuditReport, Family, ProbeError, SpMode, SpSemantics,
    SweepConfig, DEFAULT_MAX_AGENT_ITEMS,
};
use crate::greedy::fractional_greedy;
use crate::instances::{self, generate, GeneratorKind, GeneratorSpec, InstancesError};
use crate::mechanisms::{Mechanism, MechanismError, OutcomeDistribution};
use crate::model::Instance;
use crate::rational::Rational;
use crate::solver::{solve_opt_with, Limits, SolverError, DEFAULT_MAX_ITEMS};

pub const MAX_ITEMS_VAR: &str = "MECHLAB_MAX_ITEMS";
pub const MAX_AGENT_ITEMS_VAR: &str = "MECHLAB_MAX_AGENT_ITEMS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Status {
    Clean = 0,
    Findings = 1,
    Input = 2,
    SizeGuard = 3,
    Inapplicable = 4,
}

impl Status {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Instances(#[from] InstancesError),
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Audit(#[from] AuditError),
    #[error("cannot start worker threads: {0}")]
    Threads(#[from] rayon::ThreadPoolBuildError),
    #[error("cannot write output: {0}")]
    Output(#[from] io::Error),
}

impl From<ProbeError> for CliError {
    fn from(e: ProbeError) -> Self {
        match e {
            ProbeError::MissingEpsilon => CliError::Usage(e.to_string()),
            ProbeError::Instances(e) => CliError::Instances(e),
            ProbeError::Audit(e) => CliError::Audit(e),
            ProbeError::Mechanism(e) => CliError::Mechanism(e),
        }
    }
}

impl CliError {
    pub fn status(&self) -> Status {
        match self {
            CliError::Usage(_) | CliError::Instances(_) | CliError::Output(_) => Status::Input,
            CliError::Threads(_) => Status::Input,
            CliError::Solver(_) => Status::SizeGuard,
            CliError::Mechanism(MechanismError::Solver(_)) => Status::SizeGuard,
            CliError::Mechanism(_) => Status::Inapplicable,
            CliError::Audit(e) if e.is_size_guard() => Status::SizeGuard,
            CliError::Audit(_) => Status::Inapplicable,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mechlab",
    version,
    about = "Strategyproof knapsack mechanisms: solve, run, audit, sweep, probe"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact optimum and the fractional greedy solution.
    Solve(SolveArgs),
    /// Run one mechanism and print its outcome distribution.
    Run(RunArgs),
    /// Audit one mechanism on one instance.
    Audit(AuditArgs),
    /// Audit mechanisms over a stream of generated instances.
    Sweep(SweepArgs),
    /// Run a mechanism on a lower-bound witness pair.
    Probe(ProbeArgs),
    /// Write an instance file.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

/// Where the instance comes from. Exactly one of `--catalog`, `--file` and
/// `--kind` must be given.
#[derive(Debug, Args)]
pub struct SourceArgs {
    /// A named instance, e.g. figure1 or fig4_left.
    #[arg(long)]
    pub catalog: Option<String>,
    /// An instance file.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// A generator kind; combine with --seed and --index.
    #[arg(long)]
    pub kind: Option<String>,
    /// Position in the generated stream.
    #[arg(long, default_value_t = 0)]
    pub index: u64,
    /// Generate unit-density instances regardless of kind.
    #[arg(long)]
    pub unit_density: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "human")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct MechanismArgs {
    /// Mechanism name; fit_two takes its threshold as fit_two:p/q.
    #[arg(long)]
    pub mechanism: String,
    /// Threshold for fit_two, overriding any value in the name.
    #[arg(long)]
    pub beta: Option<String>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub mechanism: MechanismArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    /// Seed for the generator and for sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Draw this many outcomes from the distribution.
    #[arg(long, default_value_t = 0)]
    pub sample: u64,
    #[arg(long, value_enum, default_value = "human")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct AuditFlags {
    #[arg(long, default_value = "full-subsets")]
    pub mode: String,
    #[arg(long, default_value = "universal")]
    pub semantics: String,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub mechanism: MechanismArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub flags: AuditFlags,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "human")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Generator kind.
    #[arg(long)]
    pub kind: String,
    #[arg(long, default_value_t = 1000)]
    pub count: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated mechanism list.
    #[arg(long, value_delimiter = ',', required = true)]
    pub mechanisms: Vec<String>,
    #[arg(long)]
    pub unit_density: bool,
    #[command(flatten)]
    pub flags: AuditFlags,
    /// Worker threads; defaults to every available core.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    /// det or rand.
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = instances::families::DEFAULT_K)]
    pub k: u32,
    /// Required for the det family.
    #[arg(long)]
    pub epsilon: Option<String>,
    /// Defaults to fit_two:987/1597 for det and randomized_fit for rand.
    #[arg(long)]
    pub mechanism: Option<String>,
    #[arg(long, value_enum, default_value = "human")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Size guards, from the environment when set.
pub fn limits_from_env() -> Result<AuditLimits, CliError> {
    fn read(var: &str, default: usize) -> Result<usize, CliError> {
        match std::env::var(var) {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|n| *n > 0)
                .ok_or_else(|| CliError::Usage(format!("{var} must be a positive integer, got {v:?}"))),
            Err(std::env::VarError::NotPresent) => Ok(default),
            Err(e) => Err(CliError::Usage(format!("{var}: {e}"))),
        }
    }
    Ok(AuditLimits {
        solver: Limits {
            max_items: read(MAX_ITEMS_VAR, DEFAULT_MAX_ITEMS)?,
        },
        max_agent_items: read(MAX_AGENT_ITEMS_VAR, DEFAULT_MAX_AGENT_ITEMS)?,
    })
}

fn parse_kind(s: &str) -> Result<GeneratorKind, CliError> {
    Ok(s.parse::<GeneratorKind>()?)
}

fn generator_spec(kind: &str, seed: u64, unit_density: bool) -> Result<GeneratorSpec, CliError> {
    let mut spec = GeneratorSpec::new(parse_kind(kind)?, seed);
    spec.unit_density |= unit_density;
    spec.validate()?;
    Ok(spec)
}

/// The instance and the identifier used in reports.
fn resolve(source: &SourceArgs, seed: u64) -> Result<(Instance, String), CliError> {
    let given = [source.catalog.is_some(), source.file.is_some(), source.kind.is_some()]
        .iter()
        .filter(|b| **b)
        .count();
    if given != 1 {
        return Err(CliError::Usage(
            "give exactly one instance source: --catalog, --file or --kind".into(),
        ));
    }
    if let Some(name) = &source.catalog {
        return Ok((instances::paper_instance(name)?, name.clone()));
    }
    if let Some(path) = &source.file {
        return Ok((instances::read_instance(path)?, path.display().to_string()));
    }
    let kind = source.kind.as_deref().unwrap_or_default();
    let spec = generator_spec(kind, seed, source.unit_density)?;
    let inst = generate(&spec, source.index)?;
    Ok((inst, audit::sweep::instance_id(&spec, source.index)))
}

fn parse_mechanism(name: &str, beta: Option<&str>) -> Result<Mechanism, CliError> {
    let mut mech: Mechanism = name
        .parse()
        .map_err(|e: crate::mechanisms::ParseMechanismError| CliError::Usage(e.to_string()))?;
    if let Some(b) = beta {
        let b: Rational = b
            .parse()
            .map_err(|e| CliError::Usage(format!("bad --beta {b:?}: {e}")))?;
        match &mut mech {
            Mechanism::FitTwo { beta } => *beta = b,
            other => {
                return Err(CliError::Usage(format!("{} takes no --beta", other.name())));
            }
        }
    }
    if let Mechanism::FitTwo { beta } = &mech {
        let lo = Rational::new(1, 2);
        let hi = Rational::new(2, 3);
        if *beta < lo || *beta > hi {
            return Err(MechanismError::BetaOutOfRange(beta.clone()).into());
        }
    }
    Ok(mech)
}

fn parse_flags(flags: &AuditFlags) -> Result<(SpMode, SpSemantics), CliError> {
    let mode = flags
        .mode
        .parse()
        .map_err(|e| CliError::Usage(format!("--mode: {e}")))?;
    let semantics = flags
        .semantics
        .parse()
        .map_err(|e| CliError::Usage(format!("--semantics: {e}")))?;
    Ok((mode, semantics))
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { Status::Input } else { Status::Clean };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code.code();
        }
    };
    match execute(&cli.command, out) {
        Ok(status) => status.code(),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.status().code()
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write) -> Result<Status, CliError> {
    let limits = limits_from_env()?;
    match command {
        Command::Solve(a) => cmd_solve(a, limits, out),
        Command::Run(a) => cmd_run(a, limits, out),
        Command::Audit(a) => cmd_audit(a, limits, out),
        Command::Sweep(a) => cmd_sweep(a, limits, out),
        Command::Probe(a) => cmd_probe(a, out),
        Command::Export(a) => cmd_export(a, out),
    }
}

fn cmd_solve(args: &SolveArgs, limits: AuditLimits, out: &mut dyn Write) -> Result<Status, CliError> {
    let (inst, id) = resolve(&args.source, args.seed)?;
    let opt = solve_opt_with(inst.items(), inst.capacity(), limits.solver)?;
    let frac = fractional_greedy(&inst);
    render::solve(out, args.format, &id, &inst, &opt, &frac)?;
    Ok(Status::Clean)
}

/// Branch indices drawn with exact probabilities.
fn draw(dist: &OutcomeDistribution, n: u64, seed: u64) -> Result<Vec<usize>, CliError> {
    use num_integer::Integer;
    let too_fine = || CliError::Usage("branch probabilities too fine to sample".into());
    let mut common = 1u64;
    for b in &dist.branches {
        let d = b.probability.denom().to_u64().ok_or_else(too_fine)?;
        common = common.lcm(&d);
    }
    let weights: Vec<u64> = dist
        .branches
        .iter()
        .map(|b| {
            (&b.probability * &Rational::from(common as usize))
                .floor()
                .to_u64()
                .ok_or_else(too_fine)
        })
        .collect::<Result<_, _>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let mut u = rng.gen_range(0..common);
        let mut pick = weights.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            if u < *w {
                pick = i;
                break;
            }
            u -= w;
        }
        picks.push(pick);
    }
    Ok(picks)
}

fn cmd_run(args: &RunArgs, limits: AuditLimits, out: &mut dyn Write) -> Result<Status, CliError> {
    let mech = parse_mechanism(&args.mechanism.mechanism, args.mechanism.beta.as_deref())?;
    let (inst, id) = resolve(&args.source, args.seed)?;
    let dist = mech.run_with(&inst, limits.solver)?;
    let opt = solve_opt_with(inst.items(), inst.capacity(), limits.solver)?;
    let samples = draw(&dist, args.sample, args.seed)?;
    render::run(out, args.format, &id, &inst, &mech, &dist, &opt.value, &samples)?;
    Ok(Status::Clean)
}

fn report_status(reports: &[AuditReport]) -> Status {
    if reports.iter().any(|r| r.size_guard) {
        Status::SizeGuard
    } else if reports.iter().any(|r| r.error.is_some()) {
        Status::Inapplicable
    } else if reports.iter().all(AuditReport::is_clean) {
        Status::Clean
    } else {
        Status::Findings
    }
}

fn cmd_audit(args: &AuditArgs, limits: AuditLimits, out: &mut dyn Write) -> Result<Status, CliError> {
    let mech = parse_mechanism(&args.mechanism.mechanism, args.mechanism.beta.as_deref())?;
    let (mode, semantics) = parse_flags(&args.flags)?;
    let (inst, id) = resolve(&args.source, args.seed)?;
    let report = audit::audit(&mech, &inst, &id, mode, semantics, limits);
    render::audit(out, args.format, &report)?;
    Ok(report_status(std::slice::from_ref(&report)))
}

fn cmd_sweep(args: &SweepArgs, limits: AuditLimits, out: &mut dyn Write) -> Result<Status, CliError> {
    let mechanisms = args
        .mechanisms
        .iter()
        .map(|m| parse_mechanism(m, None))
        .collect::<Result<Vec<_>, _>>()?;
    let (mode, semantics) = parse_flags(&args.flags)?;
    if args.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let config = SweepConfig {
        spec: generator_spec(&args.kind, args.seed, args.unit_density)?,
        count: args.count,
        mechanisms,
        mode,
        semantics,
        limits,
        threads: args.threads,
    };
    let result = run_sweep(&config)?;
    render::sweep(out, args.format, &result)?;
    Ok(report_status(&result.reports))
}

fn cmd_probe(args: &ProbeArgs, out: &mut dyn Write) -> Result<Status, CliError> {
    let family: Family = args
        .family
        .parse()
        .map_err(|e| CliError::Usage(format!("--family: {e}")))?;
    let mech = match (&args.mechanism, family) {
        (Some(m), _) => parse_mechanism(m, None)?,
        (None, Family::Det) => Mechanism::FitTwo {
            beta: crate::mechanisms::default_beta(),
        },
        (None, Family::Rand) => Mechanism::RandomizedFit,
    };
    let eps = args
        .epsilon
        .as_deref()
        .map(|e| {
            e.parse::<Rational>()
                .map_err(|err| CliError::Usage(format!("bad --epsilon {e:?}: {err}")))
        })
        .transpose()?;
    let report = lower_bound_probe(&mech, family, args.k, eps.as_ref())?;
    render::probe(out, args.format, &report)?;
    let clean = report.sp_consistent && report.min_ratio >= report.floor;
    Ok(if clean { Status::Clean } else { Status::Findings })
}

fn cmd_export(args: &ExportArgs, out: &mut dyn Write) -> Result<Status, CliError> {
    let (inst, _) = resolve(&args.source, args.seed)?;
    match &args.out {
        Some(path) => instances::write_instance(&inst, path)?,
        None => out.write_all(instances::render_instance(&inst).as_bytes())?,
    }
    Ok(Status::Clean)
}
