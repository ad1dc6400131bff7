use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use ssvrptw::bench::experiment::{profiles_from_rows, read_rows, write_rows, write_summary};
use ssvrptw::bench::{
    generate_instance, run_experiment, solve, write_profiles_csv, ExperimentSpec, GeneratorConfig, Method, SolveError,
};
use ssvrptw::expectation::{brute_force_expected_cost, expected_cost, EvalError, ENUMERATION_BUDGET};
use ssvrptw::model::io::{read_instance, read_solution, write_instance, write_solution};
use ssvrptw::model::{validate_first_stage, Instance, Plan, Strategy};
use ssvrptw::pfs::{write_stage_csv, PfsError};
use ssvrptw::search::{Budget, EvalMode, SearchError};
use ssvrptw::sim::{monte_carlo, sample_indexed, simulate, simulate_wait_and_serve, Policy, SimOutcome};

#[derive(Parser)]
#[command(
    name = "ssvrptw",
    version,
    about = "Stochastic VRPTW with random reveal times: generate, solve, evaluate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance.
    Generate(GenerateArgs),
    /// Search a first-stage solution.
    Solve(SolveArgs),
    /// Expected cost of a solution under both recourse strategies.
    Evaluate(EvaluateArgs),
    /// Monte-Carlo estimate of the rejected requests.
    Simulate(SimulateArgs),
    /// Expected cost by scenario enumeration (small instances only).
    Oracle(OracleArgs),
    /// Run an experiment spec and write result rows.
    Experiment(ExperimentArgs),
    /// Summary table and performance profiles from result rows.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// JSON generator config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    customers: Option<usize>,
    #[arg(long, conflicts_with = "waiting_at_customers")]
    waiting: Option<usize>,
    /// Waiting vertices at the customer locations.
    #[arg(long)]
    waiting_at_customers: bool,
    #[arg(long)]
    fleet: Option<usize>,
    #[arg(long)]
    capacity: Option<u32>,
    #[arg(long)]
    tw_multiplier: Option<i64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalArg {
    Rq,
    Rqplus,
    Hybrid,
}

impl From<EvalArg> for EvalMode {
    fn from(e: EvalArg) -> Self {
        match e {
            EvalArg::Rq => EvalMode::Rq,
            EvalArg::Rqplus => EvalMode::RqPlus,
            EvalArg::Hybrid => EvalMode::Hybrid,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Rq,
    Rqplus,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Rq => Strategy::Rq,
            StrategyArg::Rqplus => Strategy::RqPlus,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    /// single:A:B, astar-b10, a1-bstar, astar-bstar, exact or exact:A:B.
    #[arg(long, default_value = "astar-bstar")]
    method: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall-clock budget in seconds (not reproducible).
    #[arg(long, conflicts_with = "iterations")]
    time_limit: Option<f64>,
    /// Iteration budget, split over the stages.
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long, value_enum, default_value = "hybrid")]
    eval: EvalArg,
    /// Solution file; stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// JSON run report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// CSV of (time, iteration, cost) points.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// CSV of per-stage results.
    #[arg(long)]
    stages: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    instance: PathBuf,
    solution: PathBuf,
    /// CSV of per-request acceptance probabilities for both strategies.
    #[arg(long)]
    per_request: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    instance: PathBuf,
    /// Recourse solution; without it the wait-and-serve policy is simulated.
    solution: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "rq")]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV of vehicle movements in the first sampled scenario.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    instance: PathBuf,
    solution: PathBuf,
    #[arg(long, value_enum, default_value = "rq")]
    strategy: StrategyArg,
    /// Largest number of uncertain requests to enumerate.
    #[arg(long, default_value_t = ENUMERATION_BUDGET)]
    budget: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment spec; instance paths are relative to it.
    spec: PathBuf,
    /// JSONL result rows; stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// JSONL result rows.
    results: PathBuf,
    /// Summary CSV; stdout when absent.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Performance profile CSV.
    #[arg(long)]
    profiles: Option<PathBuf>,
}

/// Writes to `path`, or to stdout.
fn emit(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut buf = Vec::new();
            write(&mut buf)?;
            fs::write(p, buf).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}

fn emit_json(path: Option<&Path>, value: &Value) -> Result<()> {
    emit(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)
    })
}

fn load_instance(path: &Path) -> Result<Instance> {
    read_instance(path).with_context(|| format!("reading instance {}", path.display()))
}

fn generate(args: GenerateArgs) -> Result<()> {
    let mut cfg: GeneratorConfig = match &args.config {
        Some(p) => serde_json::from_str(&fs::read_to_string(p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => GeneratorConfig::default(),
    };
    if let Some(n) = args.customers {
        cfg.customers = n;
    }
    if let Some(m) = args.waiting {
        cfg.waiting = Some(m);
    }
    if args.waiting_at_customers {
        cfg.waiting = None;
    }
    if let Some(k) = args.fleet {
        cfg.fleet = k;
    }
    if let Some(q) = args.capacity {
        cfg.capacity = Some(q);
    }
    if let Some(t) = args.tw_multiplier {
        cfg.tw_multiplier = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let instance = generate_instance(&cfg)?;
    match &args.out {
        Some(p) => write_instance(p, &instance)?,
        None => print!("{}", ssvrptw::model::io::instance_to_string(&instance)),
    }
    Ok(())
}

fn cost_json(cost: &ssvrptw::ExpectedCostF64) -> Value {
    json!({ "total": cost.total, "overshoot": cost.overshoot })
}

fn solve_cmd(args: SolveArgs) -> Result<()> {
    let instance = load_instance(&args.instance)?;
    let method: Method = args.method.parse()?;
    let budget = match (args.time_limit, args.iterations) {
        (Some(s), _) => Budget::Seconds(s),
        (None, Some(n)) => Budget::Iterations(n),
        (None, None) => Budget::Iterations(10_000),
    };
    let eval: EvalMode = args.eval.into();
    let clock = Instant::now();
    let outcome = solve(&instance, &method, args.seed, budget, eval)?;
    let wall_time = clock.elapsed().as_secs_f64();

    match &args.out {
        Some(p) => write_solution(p, &outcome.solution)?,
        None => print!("{}", ssvrptw::model::io::solution_to_string(&outcome.solution)),
    }
    if let Some(p) = &args.report {
        let stages: Vec<Value> = outcome
            .stages
            .iter()
            .map(|s| {
                json!({
                    "stage": s.stage,
                    "alpha": s.alpha,
                    "beta": s.beta,
                    "iterations": s.iterations,
                    "best_cost_at_stage_scale": s.best_cost_at_stage_scale,
                    "best_cost_rescored_alpha1": s.best_cost_rescored_alpha1,
                    "feasible_alpha1": s.feasible_alpha1,
                    "seconds": s.seconds,
                })
            })
            .collect();
        let report = json!({
            "instance": args.instance.display().to_string(),
            "method": method.to_string(),
            "seed": args.seed,
            "budget": budget,
            "eval": eval.name(),
            "cost": outcome.cost,
            "e_rq": cost_json(&outcome.rq),
            "e_rqplus": cost_json(&outcome.rqplus),
            "feasible": outcome.feasible,
            "iterations": outcome.iterations,
            "proven": outcome.proven,
            "stages": stages,
            "wall_time": wall_time,
        });
        emit_json(Some(p), &report)?;
    }
    if let Some(p) = &args.trace {
        emit(Some(p), |w| ssvrptw::search::write_trace_csv(&outcome.trace, w))?;
    }
    if let Some(p) = &args.stages {
        emit(Some(p), |w| write_stage_csv(&outcome.stages, w))?;
    }
    Ok(())
}

fn load_pair(instance: &Path, solution: &Path) -> Result<(Instance, ssvrptw::model::FirstStageSolution)> {
    let inst = load_instance(instance)?;
    let sol = read_solution(solution).with_context(|| format!("reading solution {}", solution.display()))?;
    Ok((inst, sol))
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    let (instance, solution) = load_pair(&args.instance, &args.solution)?;
    let (rq, rqplus) = ssvrptw::bench::score_both(&instance, &solution)?;
    let report = validate_first_stage(&solution, &instance);
    let violations: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
    emit_json(
        None,
        &json!({
            "e_rq": rq.total,
            "e_rqplus": rqplus.total,
            "expected_requests": instance.expected_requests(),
            "overshoot": rq.overshoot,
            "feasible": report.is_valid(),
            "violations": violations,
        }),
    )?;
    if let Some(p) = &args.per_request {
        emit(Some(p), |w| {
            writeln!(w, "request,p,accept_rq,accept_rqplus")?;
            for (r, req) in instance.requests().iter().enumerate() {
                writeln!(
                    w,
                    "{r},{},{},{}",
                    req.probability, rq.per_request[r], rqplus.per_request[r]
                )?;
            }
            Ok(())
        })?;
    }
    Ok(())
}

fn write_sim_trace(w: &mut dyn Write, outcome: &SimOutcome) -> io::Result<()> {
    writeln!(w, "vehicle,kind,start,end,from,to,request")?;
    for (k, events) in outcome.trace.iter().enumerate() {
        for e in events {
            let request = e.request.map_or(String::new(), |r| r.to_string());
            let kind = format!("{:?}", e.kind).to_ascii_lowercase();
            writeln!(w, "{k},{kind},{},{},{},{},{request}", e.start, e.end, e.from, e.vertex)?;
        }
    }
    Ok(())
}

fn simulate_cmd(args: SimulateArgs) -> Result<()> {
    let instance = load_instance(&args.instance)?;
    let solution = match &args.solution {
        Some(p) => Some(read_solution(p).with_context(|| format!("reading solution {}", p.display()))?),
        None => None,
    };
    if args.samples == 0 {
        bail!(Invalid("at least one sample is needed".into()));
    }
    let strategy: Strategy = args.strategy.into();
    let plan = match &solution {
        Some(s) => Some(Plan::new(strategy, &instance, s)?),
        None => None,
    };
    let policy = match &plan {
        Some(p) => Policy::Recourse(p),
        None => Policy::WaitAndServe,
    };
    let estimate = monte_carlo(policy, &instance, args.samples, args.seed);
    emit_json(
        None,
        &json!({
            "policy": if plan.is_some() { strategy.name() } else { "wait-and-serve" },
            "mean": estimate.mean,
            "std_error": estimate.std_error,
            "n_samples": estimate.n_samples,
            "seed": estimate.seed,
        }),
    )?;
    if let Some(p) = &args.trace {
        let scenario = sample_indexed(&instance, args.seed, 0);
        let outcome = match &plan {
            Some(plan) => simulate(plan, &scenario)?,
            None => simulate_wait_and_serve(&instance, &scenario)?,
        };
        emit(Some(p), |w| write_sim_trace(w, &outcome))?;
    }
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<()> {
    let (instance, solution) = load_pair(&args.instance, &args.solution)?;
    let plan = Plan::new(args.strategy.into(), &instance, &solution)?;
    let brute = brute_force_expected_cost::<f64>(&plan, args.budget)?;
    let analytic = expected_cost::<f64>(&plan);
    emit_json(
        None,
        &json!({
            "strategy": plan.strategy().name(),
            "enumerated": brute.total,
            "analytic": analytic.total,
            "difference": (brute.total - analytic.total).abs(),
        }),
    )
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    let text = fs::read_to_string(&args.spec).with_context(|| format!("reading {}", args.spec.display()))?;
    let spec: ExperimentSpec =
        serde_json::from_str(&text).map_err(|e| Invalid(format!("experiment spec {}: {e}", args.spec.display())))?;
    let base = args.spec.parent().unwrap_or(Path::new("."));
    let rows = run_experiment(&spec, base);
    emit(args.out.as_deref(), |w| write_rows(&rows, w))
}

fn report(args: ReportArgs) -> Result<()> {
    let text = fs::read_to_string(&args.results).with_context(|| format!("reading {}", args.results.display()))?;
    let rows = read_rows(&text).map_err(|e| Invalid(format!("result rows: {e}")))?;
    emit(args.summary.as_deref(), |w| write_summary(&rows, w))?;
    if let Some(p) = &args.profiles {
        let profiles = profiles_from_rows(&rows)?;
        emit(Some(p), |w| write_profiles_csv(&profiles, w))?;
    }
    Ok(())
}

/// Input that fails validation.
#[derive(Debug)]
struct Invalid(String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

fn is_budget_refusal(err: &anyhow::Error) -> bool {
    fn search(e: &SearchError) -> bool {
        matches!(e, SearchError::Budget(_) | SearchError::Eval(EvalError::Budget { .. }))
    }
    fn pfs(e: &PfsError) -> bool {
        match e {
            PfsError::Stage { source, .. } => search(source),
            PfsError::Eval(EvalError::Budget { .. }) => true,
            _ => false,
        }
    }
    err.chain().any(|cause| {
        if let Some(e) = cause.downcast_ref::<EvalError>() {
            return matches!(e, EvalError::Budget { .. });
        }
        if let Some(e) = cause.downcast_ref::<SearchError>() {
            return search(e);
        }
        if let Some(e) = cause.downcast_ref::<PfsError>() {
            return pfs(e);
        }
        match cause.downcast_ref::<SolveError>() {
            Some(SolveError::Pfs(e)) => pfs(e),
            Some(SolveError::Eval(EvalError::Budget { .. })) => true,
            _ => false,
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Oracle(a) => oracle(a),
        Command::Experiment(a) => experiment(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            // typed errors often repeat their cause in their own message
            let mut message = String::new();
            for cause in err.chain().map(ToString::to_string) {
                if !message.contains(&cause) {
                    if !message.is_empty() {
                        message.push_str(": ");
                    }
                    message.push_str(&cause);
                }
            }
            eprintln!("error: {message}");
            if is_budget_refusal(&err) {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
