use std::io::{self, Write};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{adapt_solution, scaled_problem, PfsError, PolicySchedule, ScaleConfig};
use crate::expectation::{expected_cost_rq, expected_cost_rqplus, ExpectedCost, MemoryMode};
use crate::model::{validate_first_stage, FirstStageSolution, Instance, Plan, Strategy};
use crate::search::{cold_start, local_search, EvalMode, SearchParams, TracePoint};

#[derive(Clone, Debug, PartialEq)]
pub struct StageReport {
    pub stage: usize,
    pub alpha: i64,
    pub beta: i64,
    pub seconds: f64,
    pub iterations: u64,
    pub best_cost_at_stage_scale: f64,
    pub best_cost_rescored_alpha1: f64,
    pub feasible_alpha1: bool,
}

#[derive(Clone, Debug)]
pub struct PfsResult {
    /// Final solution, at scale 1.
    pub best: FirstStageSolution,
    /// Score of `best` at scale 1 under the reporting mode.
    pub cost: ExpectedCost<f64>,
    /// Score of `best` at scale 1 under the search strategy.
    pub search_cost: ExpectedCost<f64>,
    pub mode: EvalMode,
    pub feasible: bool,
    pub iterations: u64,
    pub stages: Vec<StageReport>,
    /// Concatenated stage traces, times measured from the start of the run.
    pub trace: Vec<TracePoint>,
}

impl PfsResult {
    pub fn hybrid_scores(&self) -> Option<(f64, f64)> {
        (self.mode == EvalMode::Hybrid).then(|| (self.search_cost.total, self.cost.total))
    }
}

fn score(base: &Instance, strategy: Strategy, solution: &FirstStageSolution) -> Result<ExpectedCost<f64>, PfsError> {
    let plan = Plan::new(strategy, base, solution)?;
    Ok(match strategy {
        Strategy::Rq => expected_cost_rq(&plan)?,
        Strategy::RqPlus => expected_cost_rqplus(&plan, MemoryMode::Streaming)?,
    })
}

/// Runs one local search per stage of `schedule`, each on the problem
/// scaled to that stage and started from the previous stage's result
/// adapted to the new scale. `params.budget` is ignored in favor of the
/// stage budgets; stage `i` searches with seed `params.seed + i`. Without a
/// start solution, a cold start is drawn from the first stage's domain.
pub fn pfs_run(
    base: &Instance,
    schedule: &PolicySchedule,
    params: &SearchParams,
    start: Option<&FirstStageSolution>,
) -> Result<PfsResult, PfsError> {
    schedule.validate()?;
    let clock = Instant::now();
    let search_strategy = params.eval_mode.search_strategy();
    let stage_mode = match params.eval_mode {
        EvalMode::Hybrid => EvalMode::Rq,
        mode => mode,
    };

    let first = schedule.stages[0].config;
    let unit = ScaleConfig { alpha: 1, beta: 1 };
    let (mut current, mut scale) = match start {
        Some(s) => (s.clone(), unit),
        None => {
            let problem = scaled_problem(base, first)?;
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            (cold_start(&problem.instance, &problem.domain, &mut rng), first)
        }
    };

    let mut stages = Vec::with_capacity(schedule.stages.len());
    let mut trace = Vec::new();
    let mut iterations = 0;
    for (i, stage) in schedule.stages.iter().enumerate() {
        let cfg = stage.config;
        let wrap = |source| PfsError::Stage {
            stage: i,
            alpha: cfg.alpha,
            beta: cfg.beta,
            source,
        };
        let problem = scaled_problem(base, cfg)?;
        let adapted = adapt_solution(&current, scale, cfg, base)?;
        let stage_params = SearchParams {
            budget: stage.budget,
            seed: params.seed.wrapping_add(i as u64),
            eval_mode: stage_mode,
            ..params.clone()
        };
        let offset = clock.elapsed().as_secs_f64();
        let result = local_search(&problem, &adapted, &stage_params).map_err(wrap)?;
        iterations += result.iterations;
        trace.extend(result.trace.iter().map(|p| TracePoint {
            t_seconds: p.t_seconds + offset,
            ..*p
        }));
        current = result.best;
        scale = cfg;

        let at_unit = adapt_solution(&current, scale, unit, base)?;
        stages.push(StageReport {
            stage: i,
            alpha: cfg.alpha,
            beta: cfg.beta,
            seconds: clock.elapsed().as_secs_f64() - offset,
            iterations: result.iterations,
            best_cost_at_stage_scale: result.search_cost.total,
            best_cost_rescored_alpha1: score(base, search_strategy, &at_unit)?.total,
            feasible_alpha1: validate_first_stage(&at_unit, base).is_valid(),
        });
    }

    let best = adapt_solution(&current, scale, unit, base)?;
    let feasible = validate_first_stage(&best, base).is_valid();
    let search_cost = score(base, search_strategy, &best)?;
    let cost = match params.eval_mode {
        EvalMode::Hybrid => score(base, Strategy::RqPlus, &best)?,
        _ => search_cost.clone(),
    };
    Ok(PfsResult {
        best,
        cost,
        search_cost,
        mode: params.eval_mode,
        feasible,
        iterations,
        stages,
        trace,
    })
}

pub fn write_stage_csv<W: Write>(stages: &[StageReport], mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "stage,alpha,beta,seconds,best_cost_at_stage_scale,best_cost_rescored_alpha1"
    )?;
    for s in stages {
        writeln!(
            out,
            "{},{},{},{:.6},{},{}",
            s.stage, s.alpha, s.beta, s.seconds, s.best_cost_at_stage_scale, s.best_cost_rescored_alpha1
        )?;
    }
    Ok(())
}
