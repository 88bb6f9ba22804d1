//! Command-line driver: solve single systems, enumerate all roots, sample
//! start pairs, evaluate condition numbers, and run the seeded Monte Carlo
//! experiments. Structured output is JSON (CSV for bulk per-trial rows).
//!
//! Exit codes: 0 on solver success / experiment PASS, 1 on solver failure
//! or FAIL/INCONCLUSIVE verdicts, 2 on usage or input-file errors.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use polyhom::algebra::{read_point, read_system};
use polyhom::experiments::{self, ExperimentRun, Verdict};
use polyhom::homotopy::{StepStrategy, TrackerConfig};
use polyhom::sampling::bp_initial_pair;
use polyhom::solvers::{self, system_hash};
use polyhom::{DegreeProfile, SeedSpec};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "polyhom",
    about = "Homogeneous polynomial system solving by sphere homotopy",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Track one zero of the input system from a start pair.
    Solve(SolveArgs),
    /// Track all paths from the roots-of-unity start system.
    AllRoots(AllRootsArgs),
    /// Sample a random (system, zero) start pair.
    SamplePair(SamplePairArgs),
    /// Condition numbers of a (system, point) pair.
    Condition(ConditionArgs),
    /// Seeded Monte Carlo experiments.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Rand,
    Det,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Mu2,
    Condlen,
}

impl From<StrategyArg> for StepStrategy {
    fn from(value: StrategyArg) -> Self {
        match value {
            StrategyArg::Mu2 => StepStrategy::MuSquared,
            StrategyArg::Condlen => StepStrategy::ConditionLength,
        }
    }
}

#[derive(Args)]
struct TrackerArgs {
    /// Step-size strategy.
    #[arg(long, value_enum, default_value = "condlen")]
    strategy: StrategyArg,
    /// Step budget constant c.
    #[arg(long, default_value_t = 0.04)]
    step_constant: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: u64,
    #[arg(long, default_value_t = 1e12)]
    mu_cap: f64,
    /// Newton corrections per step.
    #[arg(long, default_value_t = 1)]
    corrections: u32,
}

impl TrackerArgs {
    fn config(&self, record_trace: bool) -> Result<TrackerConfig> {
        if self.step_constant <= 0.0 {
            return Err(anyhow!("--step-constant must be positive"));
        }
        if self.max_steps == 0 {
            return Err(anyhow!("--max-steps must be positive"));
        }
        if self.mu_cap <= 0.0 {
            return Err(anyhow!("--mu-cap must be positive"));
        }
        Ok(TrackerConfig {
            strategy: self.strategy.into(),
            step_constant: self.step_constant,
            max_steps: self.max_steps,
            mu_cap: self.mu_cap,
            corrections: self.corrections.max(1),
            certify_end: true,
            record_trace,
        })
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    algo: AlgoArg,
    #[command(flatten)]
    tracker: TrackerArgs,
    /// Master seed (randomized algorithm).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the per-step trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct AllRootsArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    tracker: TrackerArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    /// Number of equations.
    #[arg(long)]
    n: usize,
    /// Component degrees, comma separated (one per equation).
    #[arg(long, value_delimiter = ',', required = true)]
    degrees: Vec<u32>,
}

impl ProfileArgs {
    fn profile(&self) -> Result<DegreeProfile> {
        if self.degrees.len() != self.n {
            return Err(anyhow!(
                "--degrees lists {} values, expected n = {}",
                self.degrees.len(),
                self.n
            ));
        }
        DegreeProfile::new(self.degrees.clone()).map_err(|e| anyhow!("{e}"))
    }
}

#[derive(Args)]
struct SamplePairArgs {
    #[command(flatten)]
    profile: ProfileArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stream id (trial index) within the seed.
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConditionArgs {
    #[arg(long)]
    input: PathBuf,
    /// JSON array of {"re", "im"} coordinates.
    #[arg(long)]
    point: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentName {
    #[value(name = "sphere-muF", alias = "sphere-muf")]
    SphereMuF,
    #[value(name = "gaussian-muF", alias = "gaussian-muf")]
    GaussianMuF,
    #[value(name = "bp-pair-law")]
    BpPairLaw,
    #[value(name = "matrix-moment")]
    MatrixMoment,
    #[value(name = "tangent-average")]
    TangentAverage,
    #[value(name = "randomized-steps")]
    RandomizedSteps,
    #[value(name = "sphere-lemma")]
    SphereLemma,
    #[value(name = "polar-moment")]
    PolarMoment,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(value_enum)]
    name: ExperimentName,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    degrees: Option<Vec<u32>>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Gaussian standard deviation parameter.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Path to a system used as the Gaussian center (gaussian-muF).
    #[arg(long)]
    center: Option<PathBuf>,
    /// Use `scale * Id` as the matrix center (matrix-moment).
    #[arg(long)]
    center_scale: Option<f64>,
    /// Matrix dimension (matrix-moment).
    #[arg(long)]
    dim: Option<usize>,
    /// Real dimension m (polar-moment).
    #[arg(long)]
    m: Option<u32>,
    /// Homogeneity exponent p (polar-moment).
    #[arg(long)]
    p: Option<i32>,
    /// System providing the pair for tangent-average (default: the
    /// roots-of-unity start system at its all-ones zero).
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    tracker: TrackerArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write per-trial samples as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

/// SOLVER_THREADS caps parallelism (default: machine parallelism).
fn init_thread_pool() {
    if let Ok(value) = std::env::var("SOLVER_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve(args) => solve(args),
        Command::AllRoots(args) => all_roots(args),
        Command::SamplePair(args) => sample_pair(args),
        Command::Condition(args) => condition(args),
        Command::Experiment(args) => experiment(args),
    }
}

fn solve(args: SolveArgs) -> Result<ExitCode> {
    let system = read_system(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let cfg = args.tracker.config(args.trace.is_some())?;
    let report = match args.algo {
        AlgoArg::Rand => solvers::solve_randomized(&system, &cfg, SeedSpec::new(args.seed, 0))
            .map_err(|e| anyhow!("{e}"))?,
        AlgoArg::Det => solvers::solve_deterministic(&system, &cfg).map_err(|e| anyhow!("{e}"))?,
    };
    if let Some(trace_path) = &args.trace {
        report::write_trace_csv(trace_path, &report.result.trace)?;
    }
    report::emit(args.out.as_deref(), &report::solve_document(&report))?;
    Ok(if report.succeeded() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn all_roots(args: AllRootsArgs) -> Result<ExitCode> {
    let system = read_system(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let started = std::time::Instant::now();
    let mut cfg = args.tracker.config(false)?;
    // Robust default for exhaustive root finding.
    if !matches!(args.tracker.strategy, StrategyArg::Condlen) {
        cfg.strategy = StepStrategy::MuSquared;
    }
    let set = solvers::all_zeros(&system, &cfg).map_err(|e| anyhow!("{e}"))?;
    let doc = report::zeros_document(&system_hash(&system), &set, started.elapsed().as_secs_f64() * 1e3);
    report::emit(args.out.as_deref(), &doc)?;
    Ok(if set.complete { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn sample_pair(args: SamplePairArgs) -> Result<ExitCode> {
    let profile = args.profile.profile()?;
    let started = std::time::Instant::now();
    let pair = bp_initial_pair(&profile, SeedSpec::new(args.seed, args.stream))
        .map_err(|e| anyhow!("{e}"))?;
    let inner = json!({
        "system": serde_json::from_str::<serde_json::Value>(
            &polyhom::algebra::system_to_json(&pair.system)
        )?,
        "zero": report::point_value(&pair.zero),
        "residual": pair.residual,
        "seed": {"seed": args.seed, "stream": args.stream},
    });
    let doc = report::document(inner, started.elapsed().as_secs_f64() * 1e3);
    report::emit(args.out.as_deref(), &doc)?;
    Ok(ExitCode::SUCCESS)
}

fn condition(args: ConditionArgs) -> Result<ExitCode> {
    let system = read_system(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let coords = read_point(&args.point).with_context(|| format!("reading {}", args.point.display()))?;
    if coords.len() != system.n() + 1 {
        return Err(anyhow!(
            "point has {} coordinates, system needs {}",
            coords.len(),
            system.n() + 1
        ));
    }
    let point = polyhom::ProjPoint::new(coords).map_err(|e| anyhow!("{e}"))?;
    let started = std::time::Instant::now();
    let est = polyhom::conditioning::condition_estimate(&system, &point);
    println!("mu = {}", est.mu);
    println!("mu_F = {}", est.mu_frobenius);
    let inner = json!({
        "input_hash": system_hash(&system),
        "mu": est.mu,
        "mu_frobenius": est.mu_frobenius,
        "singular": est.singular,
    });
    if args.out.is_some() {
        let doc = report::document(inner, started.elapsed().as_secs_f64() * 1e3);
        report::emit(args.out.as_deref(), &doc)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn experiment(args: ExperimentArgs) -> Result<ExitCode> {
    if args.trials == 0 {
        return Err(anyhow!("--trials must be positive"));
    }
    let run = dispatch_experiment(&args)?;
    if let Some(csv) = &args.csv {
        report::write_trials_csv(csv, &run.samples, run.aux_label)?;
    }
    let verdict = run.report.verdict;
    let doc = report::experiment_document(&run);
    report::emit(args.out.as_deref(), &doc)?;
    eprintln!(
        "{}: estimate {:.6} vs target {:.6} [{:?}]",
        run.report.name, run.report.estimate, run.report.target, verdict
    );
    Ok(if verdict == Verdict::Pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// Fiber-averaging experiments re-solve every zero per trial; cap the
/// Bezout count so a typo cannot schedule an astronomic run.
fn ensure_small_fiber(profile: &DegreeProfile) -> Result<()> {
    if profile.bezout() > 64 {
        return Err(anyhow!(
            "this experiment tracks all {} zeros per trial; profiles are limited to 64",
            profile.bezout()
        ));
    }
    Ok(())
}

fn profile_from(args: &ExperimentArgs) -> Result<DegreeProfile> {
    let n = args.n.ok_or_else(|| anyhow!("--n is required for this experiment"))?;
    let degrees = args
        .degrees
        .clone()
        .ok_or_else(|| anyhow!("--degrees is required for this experiment"))?;
    if degrees.len() != n {
        return Err(anyhow!("--degrees lists {} values, expected n = {n}", degrees.len()));
    }
    DegreeProfile::new(degrees).map_err(|e| anyhow!("{e}"))
}

fn dispatch_experiment(args: &ExperimentArgs) -> Result<ExperimentRun> {
    match args.name {
        ExperimentName::SphereMuF => {
            let profile = profile_from(args)?;
            ensure_small_fiber(&profile)?;
            Ok(experiments::exp_sphere_muf(&profile, args.trials, args.seed))
        }
        ExperimentName::GaussianMuF => {
            let profile = profile_from(args)?;
            ensure_small_fiber(&profile)?;
            let center = match &args.center {
                Some(path) => Some(read_system(path).with_context(|| format!("reading {}", path.display()))?),
                None => None,
            };
            if args.sigma <= 0.0 {
                return Err(anyhow!("--sigma must be positive"));
            }
            Ok(experiments::exp_gaussian_muf(
                &profile,
                center.as_ref(),
                args.sigma,
                args.trials,
                args.seed,
            ))
        }
        ExperimentName::BpPairLaw => {
            let profile = profile_from(args)?;
            Ok(experiments::exp_bp_pair_law(&profile, args.trials, args.seed))
        }
        ExperimentName::MatrixMoment => {
            let dim = args.dim.ok_or_else(|| anyhow!("--dim is required for matrix-moment"))?;
            if dim == 0 {
                return Err(anyhow!("--dim must be positive"));
            }
            if args.sigma <= 0.0 {
                return Err(anyhow!("--sigma must be positive"));
            }
            let center = args.center_scale.map(|scale| {
                nalgebra::DMatrix::from_diagonal_element(dim, dim, polyhom::C64::new(scale, 0.0))
            });
            Ok(experiments::exp_matrix_moment(
                dim,
                center.as_ref(),
                args.sigma,
                args.trials,
                args.seed,
            ))
        }
        ExperimentName::TangentAverage => {
            let (system, zero) = match &args.input {
                Some(path) => {
                    let system = read_system(path).with_context(|| format!("reading {}", path.display()))?;
                    let cfg = experiments::ground_truth_config();
                    let set = solvers::all_zeros(&system, &cfg).map_err(|e| anyhow!("{e}"))?;
                    let zero = set
                        .zeros
                        .into_iter()
                        .next()
                        .ok_or_else(|| anyhow!("no certified zero found for the input system"))?;
                    (system, zero)
                }
                None => {
                    let profile = profile_from(args)?;
                    let system = solvers::ubar(&profile);
                    let zero = solvers::ubar_zeros(&profile).into_iter().next().expect("nonempty");
                    (system, zero)
                }
            };
            experiments::exp_tangent_average(&system, &zero, args.trials, args.seed)
                .map_err(|e| anyhow!("{e}"))
        }
        ExperimentName::RandomizedSteps => {
            let profile = profile_from(args)?;
            let cfg = args.tracker.config(false)?;
            Ok(experiments::exp_randomized_steps(&profile, args.trials, &cfg, args.seed))
        }
        ExperimentName::SphereLemma => {
            let profile = profile_from(args)?;
            if profile.bezout() > 16 {
                return Err(anyhow!("sphere-lemma needs a profile with at most 16 zeros"));
            }
            Ok(experiments::exp_sphere_lemma(&profile, args.trials, args.seed))
        }
        ExperimentName::PolarMoment => {
            let m = args.m.ok_or_else(|| anyhow!("--m is required for polar-moment"))?;
            let p = args.p.ok_or_else(|| anyhow!("--p is required for polar-moment"))?;
            if p <= -(m as i32) {
                return Err(anyhow!("--p must exceed -m"));
            }
            Ok(experiments::exp_polar_moment(m, p, args.trials, args.seed))
        }
    }
}
