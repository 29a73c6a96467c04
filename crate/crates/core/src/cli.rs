//! Command-line front end: single runs, benchmark suites and sweeps.
//!
//! Every output file is written to a temporary name and renamed into place.
//! Traces start with a header line that echoes the problem metadata and the
//! full optimizer configuration, followed by one record per iteration.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::constraints::{constrained_init, min_run_spec, AutomatonSpec};
use crate::error::Error;
use crate::learner::{Likelihood, Protes, ProtesConfig, ProtesOutcome};
use crate::problems::{
    analytic_problem, constrained_control_problem, control_problem, exhaustive_minimum, qubo_problem,
    AnalyticFunction, Negated, PlantedProblem, Problem, QuboKind, MAX_ENUMERATION,
};
use crate::tensor_train::{MultiIndex, TensorTrain};

#[derive(Debug, Parser)]
#[command(name = "protes", version, about = "Discrete black-box optimization with a tensor-train sampler")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimize one problem for one or more seeds.
    Run(RunArgs),
    /// Run a fixed benchmark suite and write a CSV table.
    Bench(BenchArgs),
    /// Run a problem over a grid of hyperparameters.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Analytic,
    Qubo,
    Control,
    ControlConstrained,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LikelihoodArg {
    Normalized,
    Unnormalized,
}

impl From<LikelihoodArg> for Likelihood {
    fn from(arg: LikelihoodArg) -> Self {
        match arg {
            LikelihoodArg::Normalized => Likelihood::Normalized,
            LikelihoodArg::Unnormalized => Likelihood::Unnormalized,
        }
    }
}

/// Which problem to build and its size parameters.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ProblemArgs {
    /// Analytic function, QUBO kind, `control`, `control_constrained` or `planted`.
    #[arg(long)]
    pub problem: String,
    /// Dimension (default 7 analytic, 50 QUBO, 6 planted).
    #[arg(long)]
    pub d: Option<usize>,
    /// Grid nodes per dimension (default 16 analytic, 4 planted).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Control horizon (default 25).
    #[arg(long = "T")]
    pub horizon: Option<usize>,
    /// Minimum run length of ones; turns `control` into the constrained variant.
    #[arg(long = "constraint-l")]
    pub constraint_l: Option<usize>,
    /// RK4 steps per unit interval for control problems.
    #[arg(long, default_value_t = 10)]
    pub substeps: usize,
    /// Seed of the random instance (QUBO, planted); defaults to `--seed`.
    #[arg(long = "instance-seed")]
    pub instance_seed: Option<u64>,
}

/// Optimizer hyperparameters.
#[derive(Debug, Clone, Args)]
pub struct OptimizerArgs {
    #[arg(long, short = 'M', default_value_t = 10_000)]
    pub budget: usize,
    #[arg(long = "K", default_value_t = 100)]
    pub samples: usize,
    #[arg(long = "k", default_value_t = 10)]
    pub top_k: usize,
    #[arg(long = "kgd", default_value_t = 1)]
    pub gd_steps: usize,
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    #[arg(long, short = 'R', default_value_t = 5)]
    pub rank: usize,
    #[arg(long, value_enum, default_value = "normalized")]
    pub likelihood: LikelihoodArg,
}

impl OptimizerArgs {
    fn config(&self, seed: u64) -> ProtesConfig {
        ProtesConfig {
            budget: self.budget,
            samples: self.samples,
            top_k: self.top_k,
            gd_steps: self.gd_steps,
            lr: self.lr,
            rank: self.rank,
            seed,
            likelihood: self.likelihood.into(),
            ..ProtesConfig::default()
        }
    }
}

/// Seeds, orientation and output shared by all subcommands.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Repetitions with seeds `seed, seed + 1, ...`.
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, value_enum, default_value = "min")]
    pub mode: Mode,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Write zero for every wall-clock field so that reruns are byte-identical.
    #[arg(long = "no-timing")]
    pub no_timing: bool,
    /// Let constrained runs update entries that are zero in the indicator.
    #[arg(long = "no-freeze")]
    pub no_freeze: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Dimension of the large QUBO tier.
    #[arg(long = "qubo-d", default_value_t = 50)]
    pub qubo_d: usize,
    /// Dimension of the exhaustively checked QUBO tier.
    #[arg(long = "oracle-d", default_value_t = 16)]
    pub oracle_d: usize,
    /// Control horizons.
    #[arg(long = "horizons", value_delimiter = ',', default_values_t = [25, 50, 100])]
    pub horizons: Vec<usize>,
    #[arg(long = "instance-seed", default_value_t = 0)]
    pub instance_seed: u64,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, short = 'M', default_value_t = 10_000)]
    pub budget: usize,
    #[arg(long = "K", value_delimiter = ',', num_args = 0..)]
    pub samples: Option<Vec<usize>>,
    #[arg(long = "k", value_delimiter = ',', num_args = 0..)]
    pub top_k: Option<Vec<usize>>,
    #[arg(long = "kgd", value_delimiter = ',', num_args = 0..)]
    pub gd_steps: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub lr: Option<Vec<f64>>,
    #[arg(long, short = 'R', value_delimiter = ',', num_args = 0..)]
    pub rank: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "normalized")]
    pub likelihood: LikelihoodArg,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Failure with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::UnknownProblem(_) | Error::InvalidProblem(_) | Error::InvalidConfig(_) | Error::InitShape { .. } => 2,
            _ => 1,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        CliError {
            code: 1,
            message: err.to_string(),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError {
            code: 1,
            message: err.to_string(),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError {
            code: 1,
            message: err.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. `PROTES_THREADS` caps the worker pool.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return err.exit_code();
        }
    };
    match with_thread_limit(|| execute(&cli)) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.code
        }
    }
}

fn with_thread_limit<F>(f: F) -> CliResult<()>
where
    F: FnOnce() -> CliResult<()> + Send,
{
    let Ok(raw) = std::env::var("PROTES_THREADS") else {
        return f();
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("PROTES_THREADS must be a positive integer, got {raw:?}")))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError {
            code: 1,
            message: e.to_string(),
        })?;
    pool.install(f)
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Run(args) => run(args).map(|_| ()),
        Command::Bench(args) => bench(args).map(|_| ()),
        Command::Sweep(args) => sweep(args).map(|_| ()),
    }
}

/// A problem ready to optimize, with its constrained-run extras.
struct Prepared {
    label: String,
    problem: Box<dyn Problem>,
    indicator: Option<TensorTrain>,
    automaton: Option<AutomatonSpec>,
    /// Grids small enough to enumerate get an exhaustive reference.
    enumerable: bool,
}

impl Prepared {
    /// Exhaustive minimum in the minimized orientation.
    fn optimum(&self) -> CliResult<Option<f64>> {
        if !self.enumerable {
            return Ok(None);
        }
        Ok(Some(exhaustive_minimum(&self.problem)?.1))
    }
}

fn enumerable(shape: &[usize]) -> bool {
    shape
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .is_some_and(|t| t <= MAX_ENUMERATION)
}

fn prepare(args: &ProblemArgs, default_seed: u64, mode: Mode) -> CliResult<Prepared> {
    let seed = args.instance_seed.unwrap_or(default_seed);
    let name = args.problem.as_str();
    let mut indicator = None;
    let mut automaton = None;
    let (label, problem): (String, Box<dyn Problem>) = if let Ok(f) = name.parse::<AnalyticFunction>() {
        let d = args.d.unwrap_or(7);
        let grid = args.grid.unwrap_or(16);
        (f.name().to_string(), Box::new(analytic_problem(f.name(), d, grid)?))
    } else if let Ok(kind) = name.parse::<QuboKind>() {
        let d = args.d.unwrap_or(50);
        (format!("{}_d{d}", kind.name()), Box::new(qubo_problem(name, d, seed)?))
    } else if name == "planted" {
        let shape = vec![args.grid.unwrap_or(4); args.d.unwrap_or(6)];
        ("planted".to_string(), Box::new(PlantedProblem::new(shape, seed)?))
    } else if name == "control" || name == "control_constrained" {
        let horizon = match (args.horizon, args.d) {
            (Some(t), _) => t,
            (None, Some(d)) if d >= 2 => d - 1,
            (None, Some(_)) => return Err(CliError::usage("control needs d >= 2")),
            (None, None) => 25,
        };
        let min_run = match (name, args.constraint_l) {
            ("control_constrained", l) => Some(l.unwrap_or(3)),
            (_, l) => l,
        };
        match min_run {
            Some(l) => {
                let (p, ind) = constrained_control_problem(horizon, args.substeps, l)?;
                indicator = Some(ind);
                automaton = Some(min_run_spec(horizon + 1, l)?);
                (p.name().to_string(), Box::new(p))
            }
            None => {
                let p = control_problem(horizon, args.substeps)?;
                (p.name().to_string(), Box::new(p))
            }
        }
    } else {
        return Err(Error::UnknownProblem(name.to_string()).into());
    };
    let enumerable = enumerable(problem.shape());
    let problem: Box<dyn Problem> = match mode {
        Mode::Min => problem,
        Mode::Max => Box::new(Negated(problem)),
    };
    Ok(Prepared {
        label,
        problem,
        indicator,
        automaton,
        enumerable,
    })
}

/// One finished repetition, reported in the user's orientation.
#[derive(Debug, Clone, Serialize)]
pub struct SeedResult {
    pub seed: u64,
    pub best_y: f64,
    pub best_x: MultiIndex,
    pub evals: usize,
    pub wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub admissible: Option<bool>,
}

/// Summary over repetitions. `min_best` is the best value across seeds: the
/// smallest in `min` mode and the largest in `max` mode.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub problem: String,
    pub mode: Mode,
    pub mean_best: f64,
    pub min_best: f64,
    pub per_seed: Vec<SeedResult>,
}

impl Summary {
    fn new(problem: String, mode: Mode, per_seed: Vec<SeedResult>) -> Self {
        let values = per_seed.iter().map(|r| r.best_y);
        let mean_best = values.clone().sum::<f64>() / per_seed.len() as f64;
        let min_best = match mode {
            Mode::Min => values.fold(f64::INFINITY, f64::min),
            Mode::Max => values.fold(f64::NEG_INFINITY, f64::max),
        };
        Summary {
            problem,
            mode,
            mean_best,
            min_best,
            per_seed,
        }
    }
}

struct RunContext<'a> {
    command: &'static str,
    mode: Mode,
    timing: bool,
    freeze: bool,
    problem_args: serde_json::Value,
    trace_path: &'a Path,
}

/// Runs one seed and writes its trace file.
fn run_seed(prepared: &Prepared, config: &ProtesConfig, ctx: &RunContext<'_>) -> CliResult<SeedResult> {
    let mut protes = Protes::new(config.clone());
    let constrained = prepared.indicator.is_some();
    if let Some(indicator) = &prepared.indicator {
        protes = protes
            .with_init(constrained_init(indicator, config.rank, config.seed)?)
            .with_frozen_zeros(ctx.freeze);
    }
    let start = Instant::now();
    let outcome = protes.run(&prepared.problem)?;
    let wall = if ctx.timing { start.elapsed().as_secs_f64() } else { 0.0 };
    let ProtesOutcome {
        best_x,
        best_y,
        mut trace,
        ..
    } = outcome;
    if !ctx.timing {
        trace = trace.without_timing();
    }
    let sign = match ctx.mode {
        Mode::Min => 1.0,
        Mode::Max => -1.0,
    };
    for r in &mut trace.records {
        r.best_y *= sign;
    }

    let header = json!({
        "header": {
            "command": ctx.command,
            "version": env!("CARGO_PKG_VERSION"),
            "label": prepared.label,
            "problem": prepared.problem.metadata(),
            "problem_args": ctx.problem_args,
            "config": config,
            "mode": ctx.mode,
            "constrained": constrained,
            "frozen_zeros": constrained && ctx.freeze,
        }
    });
    let mut buf = serde_json::to_vec(&header)?;
    buf.push(b'\n');
    trace.write_jsonl(&mut buf)?;
    write_atomic(ctx.trace_path, &buf)?;

    Ok(SeedResult {
        seed: config.seed,
        best_y: sign * best_y,
        evals: trace.records.last().map_or(0, |r| r.evals),
        admissible: prepared.automaton.as_ref().map(|a| a.accepts_word(&best_x)),
        best_x,
        wall_time_s: wall,
    })
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)
}

fn check_reps(common: &CommonArgs) -> CliResult<()> {
    if common.reps == 0 {
        return Err(CliError::usage("--reps must be at least 1"));
    }
    Ok(())
}

fn seeds(common: &CommonArgs) -> impl Iterator<Item = u64> + '_ {
    (0..common.reps as u64).map(move |r| common.seed + r)
}

/// `trace.jsonl` for a single repetition, `trace_seed<s>.jsonl` otherwise.
fn run_trace_path(dir: &Path, reps: usize, seed: u64) -> PathBuf {
    if reps == 1 {
        dir.join("trace.jsonl")
    } else {
        dir.join(format!("trace_seed{seed}.jsonl"))
    }
}

fn run_many(
    prepared: &Prepared,
    optimizer: &OptimizerArgs,
    common: &CommonArgs,
    problem_args: &ProblemArgs,
    command: &'static str,
    dir: &Path,
) -> CliResult<Summary> {
    let mut per_seed = Vec::with_capacity(common.reps);
    for seed in seeds(common) {
        let config = optimizer.config(seed);
        config.validate()?;
        let path = run_trace_path(dir, common.reps, seed);
        let ctx = RunContext {
            command,
            mode: common.mode,
            timing: !common.no_timing,
            freeze: !common.no_freeze,
            problem_args: serde_json::to_value(problem_args)?,
            trace_path: &path,
        };
        per_seed.push(run_seed(prepared, &config, &ctx)?);
    }
    Ok(Summary::new(prepared.label.clone(), common.mode, per_seed))
}

/// `run`: one trace per repetition plus `summary.json`.
pub fn run(args: &RunArgs) -> CliResult<Summary> {
    check_reps(&args.common)?;
    args.optimizer.config(args.common.seed).validate()?;
    let prepared = prepare(&args.problem, args.common.seed, args.common.mode)?;
    let summary = run_many(
        &prepared,
        &args.optimizer,
        &args.common,
        &args.problem,
        "run",
        &args.common.out,
    )?;
    let mut text = serde_json::to_vec_pretty(&summary)?;
    text.push(b'\n');
    write_atomic(&args.common.out.join("summary.json"), &text)?;
    Ok(summary)
}

/// One row of `bench.csv`.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub problem: String,
    pub seed: u64,
    pub best_y: f64,
    pub evals: usize,
    pub wall_time_s: f64,
    pub best_x: String,
    /// Exhaustive optimum when the grid is small enough.
    pub optimum: Option<f64>,
    /// Automaton check of `best_x` for constrained problems.
    pub admissible: Option<bool>,
}

/// Problems of a suite, as `run` arguments.
pub fn suite_problems(args: &BenchArgs) -> Vec<ProblemArgs> {
    let base = |problem: &str| ProblemArgs {
        problem: problem.to_string(),
        d: None,
        grid: None,
        horizon: None,
        constraint_l: None,
        substeps: 10,
        instance_seed: Some(args.instance_seed),
    };
    let analytic = || {
        AnalyticFunction::ALL
            .iter()
            .map(|f| ProblemArgs {
                d: Some(7),
                grid: Some(16),
                ..base(f.name())
            })
            .collect::<Vec<_>>()
    };
    let qubo = || {
        [args.qubo_d, args.oracle_d]
            .iter()
            .flat_map(|&d| {
                QuboKind::ALL.iter().map(move |k| (k.name(), d))
            })
            .map(|(name, d)| ProblemArgs {
                d: Some(d),
                ..base(name)
            })
            .collect::<Vec<_>>()
    };
    let control = |name: &str| {
        args.horizons
            .iter()
            .map(|&t| ProblemArgs {
                horizon: Some(t),
                ..base(name)
            })
            .collect::<Vec<_>>()
    };
    match args.suite {
        Suite::Analytic => analytic(),
        Suite::Qubo => qubo(),
        Suite::Control => control("control"),
        Suite::ControlConstrained => control("control_constrained"),
        Suite::All => {
            let mut all = analytic();
            all.extend(qubo());
            all.extend(control("control"));
            all.extend(control("control_constrained"));
            all
        }
    }
}

/// `bench`: every suite problem for every seed; traces go to
/// `traces/<problem>_seed<s>.jsonl` and the table to `bench.csv`.
pub fn bench(args: &BenchArgs) -> CliResult<Vec<BenchRow>> {
    check_reps(&args.common)?;
    args.optimizer.config(args.common.seed).validate()?;
    let mut rows = Vec::new();
    for problem_args in suite_problems(args) {
        let prepared = prepare(&problem_args, args.instance_seed, args.common.mode)?;
        let sign = match args.common.mode {
            Mode::Min => 1.0,
            Mode::Max => -1.0,
        };
        let optimum = prepared.optimum()?.map(|y| sign * y);
        for seed in seeds(&args.common) {
            let config = args.optimizer.config(seed);
            let path = args
                .common
                .out
                .join("traces")
                .join(format!("{}_seed{seed}.jsonl", prepared.label));
            let ctx = RunContext {
                command: "bench",
                mode: args.common.mode,
                timing: !args.common.no_timing,
                freeze: !args.common.no_freeze,
                problem_args: serde_json::to_value(&problem_args)?,
                trace_path: &path,
            };
            let r = run_seed(&prepared, &config, &ctx)?;
            rows.push(BenchRow {
                problem: prepared.label.clone(),
                seed,
                best_y: r.best_y,
                evals: r.evals,
                wall_time_s: r.wall_time_s,
                best_x: r.best_x.to_string(),
                optimum,
                admissible: r.admissible,
            });
        }
    }
    write_csv(&args.common.out.join("bench.csv"), &rows)?;
    Ok(rows)
}

fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> CliResult<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError {
        code: 1,
        message: e.to_string(),
    })?;
    write_atomic(path, &bytes)?;
    Ok(())
}

/// One row of `sweep.csv`.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    #[serde(rename = "K")]
    pub samples: usize,
    pub k: usize,
    pub kgd: usize,
    pub lr: f64,
    #[serde(rename = "R")]
    pub rank: usize,
    pub mean_best: f64,
    pub min_best: f64,
    /// `|min_best - optimum| / |optimum|` when the grid can be enumerated.
    pub rel_error: Option<f64>,
}

fn grid<T: Clone>(values: &Option<Vec<T>>, default: T, flag: &str) -> CliResult<Vec<T>> {
    match values {
        None => Ok(vec![default]),
        Some(v) if v.is_empty() => Err(CliError::usage(format!("empty grid for {flag}"))),
        Some(v) => Ok(v.clone()),
    }
}

/// `sweep`: the Cartesian product of the given grids; each point gets its own
/// directory `point<j>/` of traces and a row in `sweep.csv`.
pub fn sweep(args: &SweepArgs) -> CliResult<Vec<SweepRow>> {
    check_reps(&args.common)?;
    let defaults = ProtesConfig::default();
    let samples = grid(&args.samples, defaults.samples, "--K")?;
    let top_k = grid(&args.top_k, defaults.top_k, "--k")?;
    let gd_steps = grid(&args.gd_steps, defaults.gd_steps, "--kgd")?;
    let lrs = grid(&args.lr, defaults.lr, "--lr")?;
    let ranks = grid(&args.rank, defaults.rank, "-R")?;

    let mut points = Vec::new();
    for &s in &samples {
        for &k in &top_k {
            for &g in &gd_steps {
                for &lr in &lrs {
                    for &r in &ranks {
                        points.push(OptimizerArgs {
                            budget: args.budget,
                            samples: s,
                            top_k: k,
                            gd_steps: g,
                            lr,
                            rank: r,
                            likelihood: args.likelihood,
                        });
                    }
                }
            }
        }
    }
    for p in &points {
        p.config(args.common.seed).validate()?;
    }

    let prepared = prepare(&args.problem, args.common.seed, args.common.mode)?;
    let sign = match args.common.mode {
        Mode::Min => 1.0,
        Mode::Max => -1.0,
    };
    let optimum = prepared.optimum()?.map(|y| sign * y);
    let mut rows = Vec::with_capacity(points.len());
    for (j, point) in points.iter().enumerate() {
        let dir = args.common.out.join(format!("point{j}"));
        let summary = run_many(&prepared, point, &args.common, &args.problem, "sweep", &dir)?;
        rows.push(SweepRow {
            samples: point.samples,
            k: point.top_k,
            kgd: point.gd_steps,
            lr: point.lr,
            rank: point.rank,
            mean_best: summary.mean_best,
            min_best: summary.min_best,
            rel_error: optimum.map(|opt| relative_error(summary.min_best, opt)),
        });
    }
    write_csv(&args.common.out.join("sweep.csv"), &rows)?;
    Ok(rows)
}

/// `|found - optimum| / |optimum|`, or the absolute gap when the optimum is 0.
pub fn relative_error(found: f64, optimum: f64) -> f64 {
    let gap = (found - optimum).abs();
    if optimum == 0.0 {
        gap
    } else {
        gap / optimum.abs()
    }
}
