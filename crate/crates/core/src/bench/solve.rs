use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::expectation::{EvalError, ExpectedCost, MemoryMode};
use crate::model::{validate_first_stage, FirstStageSolution, Instance, Plan, Strategy};
use crate::pfs::{adapt_solution, pfs_run, scaled_problem, PfsError, PolicySchedule, ScaleConfig, StageReport};
use crate::search::{exact_enumerate, Budget, EvalMode, ExactParams, SearchParams, TracePoint};

/// A named solution method.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Method {
    /// A PFS preset or `single:a:b`.
    Pfs(String),
    /// Restricted enumeration at the given scale.
    Exact { alpha: i64, beta: i64 },
}

impl FromStr for Method {
    type Err = SolveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        if lower == "exact" {
            return Ok(Method::Exact { alpha: 5, beta: 60 });
        }
        if let Some(rest) = lower.strip_prefix("exact:") {
            let parsed: Option<Vec<i64>> = rest.split(':').map(|v| v.parse().ok()).collect();
            return match parsed.as_deref() {
                Some(&[alpha, beta]) => Ok(Method::Exact { alpha, beta }),
                _ => Err(SolveError::Method(format!(
                    "bad exact method '{s}', expected exact:ALPHA:BETA"
                ))),
            };
        }
        // validates the name
        PolicySchedule::parse(&lower, Budget::Iterations(1))?;
        Ok(Method::Pfs(lower))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Pfs(name) => f.write_str(name),
            Method::Exact { alpha, beta } => write!(f, "exact:{alpha}:{beta}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("{0}")]
    Method(String),
    #[error(transparent)]
    Pfs(#[from] PfsError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("the enumeration found no solution within the horizon")]
    NoSolution,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub solution: FirstStageSolution,
    pub rq: ExpectedCost<f64>,
    pub rqplus: ExpectedCost<f64>,
    /// Score under the requested evaluation mode.
    pub cost: f64,
    pub feasible: bool,
    pub iterations: u64,
    /// `Some` for the enumerator.
    pub proven: Option<bool>,
    pub stages: Vec<StageReport>,
    pub trace: Vec<TracePoint>,
}

/// Both scores of a solution at scale 1.
pub fn score_both(
    instance: &Instance,
    solution: &FirstStageSolution,
) -> Result<(ExpectedCost<f64>, ExpectedCost<f64>), EvalError> {
    let rq = crate::expectation::expected_cost_rq(&Plan::new(Strategy::Rq, instance, solution)?)?;
    let rqplus = crate::expectation::expected_cost_rqplus(
        &Plan::new(Strategy::RqPlus, instance, solution)?,
        MemoryMode::Streaming,
    )?;
    Ok((rq, rqplus))
}

/// Solves `instance` with `method` and scores the result under both
/// strategies at scale 1.
pub fn solve(
    instance: &Instance,
    method: &Method,
    seed: u64,
    budget: Budget,
    eval_mode: EvalMode,
) -> Result<SolveOutcome, SolveError> {
    let (solution, iterations, proven, stages, trace) = match method {
        Method::Pfs(name) => {
            let schedule = PolicySchedule::parse(name, budget)?;
            let params = SearchParams {
                seed,
                eval_mode,
                budget,
                ..SearchParams::default()
            };
            let r = pfs_run(instance, &schedule, &params, None)?;
            (r.best, r.iterations, None, r.stages, r.trace)
        }
        &Method::Exact { alpha, beta } => {
            let config = ScaleConfig { alpha, beta };
            let problem = scaled_problem(instance, config)?;
            let time_limit = match budget {
                Budget::Seconds(s) if s > 0.0 => Some(Duration::from_secs_f64(s)),
                _ => None,
            };
            let r = exact_enumerate(
                &problem,
                &ExactParams {
                    strategy: eval_mode.search_strategy(),
                    time_limit,
                    restricted: true,
                },
            );
            let best = r.solution.ok_or(SolveError::NoSolution)?;
            let unit = ScaleConfig { alpha: 1, beta: 1 };
            let best = adapt_solution(&best, config, unit, instance)?;
            (best, r.evaluated, Some(r.proven), Vec::new(), Vec::new())
        }
    };
    let (rq, rqplus) = score_both(instance, &solution)?;
    let cost = match eval_mode {
        EvalMode::Rq => rq.total,
        EvalMode::RqPlus | EvalMode::Hybrid => rqplus.total,
    };
    Ok(SolveOutcome {
        feasible: validate_first_stage(&solution, instance).is_valid(),
        solution,
        rq,
        rqplus,
        cost,
        iterations,
        proven,
        stages,
        trace,
    })
}
