use std::io::{self, Write};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::moves::{apply_move, sample_move, undo_move, MoveKind};
use super::{Problem, SearchError, WaitDomain};
use crate::expectation::{EvalError, Evaluator, ExpectedCost, MemoryMode};
use crate::model::{FirstStageSolution, Instance, Plan, Strategy, Time, Vertex, DEPOT, DEPOT_DEPARTURE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    Rq,
    RqPlus,
    /// Search under `Rq`, re-score the final solution under `RqPlus`.
    Hybrid,
}

impl EvalMode {
    pub fn search_strategy(self) -> Strategy {
        match self {
            EvalMode::Rq | EvalMode::Hybrid => Strategy::Rq,
            EvalMode::RqPlus => Strategy::RqPlus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EvalMode::Rq => "rq",
            EvalMode::RqPlus => "rqplus",
            EvalMode::Hybrid => "hybrid",
        }
    }
}

impl std::str::FromStr for EvalMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rq" => Ok(EvalMode::Rq),
            "rqplus" | "rq+" => Ok(EvalMode::RqPlus),
            "hybrid" => Ok(EvalMode::Hybrid),
            _ => Err(format!("unknown evaluation mode '{s}'")),
        }
    }
}

/// Stopping rule. Iteration budgets make runs reproducible; wall-clock
/// budgets do not.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Budget {
    Seconds(f64),
    Iterations(u64),
}

impl Budget {
    /// Equal share of this budget for one of `parts` stages.
    pub fn split(self, parts: usize) -> Budget {
        let parts = parts.max(1);
        match self {
            Budget::Seconds(s) => Budget::Seconds(s / parts as f64),
            Budget::Iterations(n) => Budget::Iterations(n / parts as u64),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchParams {
    pub t_init: f64,
    pub t_min: f64,
    /// Temperature factor applied after every iteration.
    pub cooling: f64,
    pub budget: Budget,
    pub seed: u64,
    pub eval_mode: EvalMode,
    /// Overshoot weight; `None` uses [`Problem::default_penalty`].
    pub penalty: Option<f64>,
    /// Compare the incremental cost with a fresh evaluation every this
    /// many iterations.
    pub verify_every: Option<u64>,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            t_init: 2.0,
            t_min: 1e-6,
            cooling: 0.95,
            budget: Budget::Iterations(10_000),
            seed: 0,
            eval_mode: EvalMode::Rq,
            penalty: None,
            verify_every: None,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<(), SearchError> {
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(SearchError::InvalidParams(format!(
                "cooling factor {} not in (0, 1)",
                self.cooling
            )));
        }
        if !(self.t_min > 0.0 && self.t_min < self.t_init) {
            return Err(SearchError::InvalidParams(format!(
                "need 0 < t_min < t_init, got {} and {}",
                self.t_min, self.t_init
            )));
        }
        if let Some(lambda) = self.penalty {
            if !(lambda >= 0.0) {
                return Err(SearchError::InvalidParams(format!("penalty {lambda} is negative")));
            }
        }
        match self.budget {
            Budget::Seconds(s) if !(s > 0.0) => Err(SearchError::Budget(format!("time limit {s} s is not positive"))),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub t_seconds: f64,
    pub iteration: u64,
    pub current_cost: f64,
    pub best_cost: f64,
    pub alpha: i64,
    pub beta: i64,
}

/// Both strategy scores of one solution.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridScore {
    pub rq: ExpectedCost<f64>,
    pub rqplus: ExpectedCost<f64>,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub best: FirstStageSolution,
    /// Score of `best` under the mode the search reports: the search
    /// strategy for `Rq`/`RqPlus`, the `RqPlus` re-score for `Hybrid`.
    pub cost: ExpectedCost<f64>,
    pub mode: EvalMode,
    /// Under `Hybrid`: the `Rq` score the search optimized.
    pub search_cost: ExpectedCost<f64>,
    /// Expected cost plus the overshoot penalty, under the search strategy.
    pub objective: f64,
    pub feasible: bool,
    pub iterations: u64,
    pub accepted: u64,
    pub restarts: u64,
    pub trace: Vec<TracePoint>,
}

impl SearchResult {
    /// `Rq` and `RqPlus` scores when the mode produced both.
    pub fn hybrid_scores(&self) -> Option<(f64, f64)> {
        (self.mode == EvalMode::Hybrid).then(|| (self.search_cost.total, self.cost.total))
    }

    pub fn write_trace_csv<W: Write>(&self, out: W) -> io::Result<()> {
        write_trace_csv(&self.trace, out)
    }
}

pub fn write_trace_csv<W: Write>(trace: &[TracePoint], mut out: W) -> io::Result<()> {
    writeln!(out, "t_seconds,current_cost,best_cost,alpha,beta")?;
    for p in trace {
        writeln!(
            out,
            "{:.6},{},{},{},{}",
            p.t_seconds, p.current_cost, p.best_cost, p.alpha, p.beta
        )?;
    }
    Ok(())
}

/// Scores a solution under both strategies.
pub fn evaluate_hybrid(instance: &Instance, solution: &FirstStageSolution) -> Result<HybridScore, EvalError> {
    let rq = crate::expectation::expected_cost_rq(&Plan::new(Strategy::Rq, instance, solution)?)?;
    let rqplus = crate::expectation::expected_cost_rqplus(
        &Plan::new(Strategy::RqPlus, instance, solution)?,
        MemoryMode::Streaming,
    )?;
    Ok(HybridScore { rq, rqplus })
}

/// Starting solution: each vehicle visits one distinct random waiting
/// vertex with the largest domain value that keeps it within the horizon
/// (the smallest value when none does).
pub fn cold_start<R: Rng>(instance: &Instance, domain: &WaitDomain, rng: &mut R) -> FirstStageSolution {
    let mut solution = FirstStageSolution::empty(instance.fleet());
    let mut vertices: Vec<Vertex> = instance.waiting_vertices().collect();
    vertices.shuffle(rng);
    for (route, w) in solution.routes.iter_mut().zip(vertices) {
        let slack: Time = instance.horizon() - DEPOT_DEPARTURE - instance.travel(DEPOT, w) - instance.travel(w, DEPOT);
        route.push(w);
        solution
            .wait
            .insert(w, domain.max_at_most(slack).unwrap_or(domain.min()));
    }
    solution
}

struct Scored {
    solution: FirstStageSolution,
    cost: ExpectedCost<f64>,
    objective: f64,
}

/// Simulated annealing from `start` on `problem`. Every iteration draws a
/// move kind uniformly (re-drawing kinds that do not apply), evaluates the
/// neighbor incrementally, accepts improvements and otherwise accepts with
/// probability exp(−Δ/T). The objective is the expected cost plus the
/// penalty times the total horizon overshoot. Returns the best feasible
/// solution seen, or the best penalized one when none was feasible.
pub fn local_search(
    problem: &Problem,
    start: &FirstStageSolution,
    params: &SearchParams,
) -> Result<SearchResult, SearchError> {
    params.validate()?;
    let clock = Instant::now();
    let instance = &problem.instance;
    let strategy = params.eval_mode.search_strategy();
    let lambda = params.penalty.unwrap_or_else(|| problem.default_penalty());
    let objective = |c: &ExpectedCost<f64>| c.total + lambda * c.overshoot as f64;

    let mut current = start.clone();
    if current.routes.len() < instance.fleet() {
        current.routes.resize(instance.fleet(), Vec::new());
    }
    current.prune_waits();

    let mut evaluator = Evaluator::<f64>::new(instance, strategy, MemoryMode::Full);
    let mut current_cost = evaluator.evaluate(&current).map_err(SearchError::InvalidStart)?;
    let mut current_obj = objective(&current_cost);
    let mut best_any = Scored {
        solution: current.clone(),
        cost: current_cost.clone(),
        objective: current_obj,
    };
    let mut best_feasible = current_cost.is_feasible().then(|| Scored {
        solution: current.clone(),
        cost: current_cost.clone(),
        objective: current_obj,
    });

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let scale = problem.scale;
    let mut trace = Vec::new();
    let point = |t: f64, iteration: u64, current: f64, best: f64| TracePoint {
        t_seconds: t,
        iteration,
        current_cost: current,
        best_cost: best,
        alpha: scale.alpha,
        beta: scale.beta,
    };
    trace.push(point(0.0, 0, current_obj, current_obj));

    let mut temperature = params.t_init;
    let (mut iterations, mut accepted, mut restarts) = (0u64, 0u64, 0u64);
    let mut kinds = MoveKind::ALL;
    loop {
        match params.budget {
            Budget::Iterations(n) if iterations >= n => break,
            Budget::Seconds(s) if clock.elapsed().as_secs_f64() >= s => break,
            _ => {}
        }
        kinds.shuffle(&mut rng);
        let Some(mv) = kinds
            .iter()
            .find_map(|&kind| sample_move(kind, &current, instance, &problem.domain, &mut rng))
        else {
            break;
        };
        iterations += 1;

        let undo = apply_move(&mut current, &mv, &problem.domain);
        let cost = evaluator.update(&current)?;
        let obj = objective(&cost);
        let delta = obj - current_obj;
        let accept = delta <= 0.0 || rng.random::<f64>() < (-delta / temperature).exp();
        if accept {
            accepted += 1;
            current_cost = cost;
            current_obj = obj;
            if let Some(k) = params.verify_every {
                if k > 0 && iterations % k == 0 {
                    verify(instance, strategy, &current, &current_cost, iterations)?;
                }
            }
            let mut improved = false;
            if current_obj < best_any.objective {
                best_any = Scored {
                    solution: current.clone(),
                    cost: current_cost.clone(),
                    objective: current_obj,
                };
                improved = true;
            }
            if current_cost.is_feasible() && best_feasible.as_ref().is_none_or(|b| current_obj < b.objective) {
                best_feasible = Some(Scored {
                    solution: current.clone(),
                    cost: current_cost.clone(),
                    objective: current_obj,
                });
                improved = true;
            }
            if improved {
                let best = best_feasible.as_ref().unwrap_or(&best_any).objective;
                trace.push(point(clock.elapsed().as_secs_f64(), iterations, current_obj, best));
            }
        } else {
            undo_move(&mut current, undo);
        }

        temperature *= params.cooling;
        if temperature < params.t_min {
            temperature = params.t_init;
            restarts += 1;
        }
    }

    let feasible = best_feasible.is_some();
    let mut best = best_feasible.unwrap_or(best_any);
    best.cost.scale = scale;
    trace.push(point(
        clock.elapsed().as_secs_f64(),
        iterations,
        current_obj,
        best.objective,
    ));

    let cost = match params.eval_mode {
        EvalMode::Hybrid => {
            let plan = Plan::new(Strategy::RqPlus, instance, &best.solution).map_err(EvalError::from)?;
            let mut c = crate::expectation::expected_cost_rqplus::<f64>(&plan, MemoryMode::Streaming)?;
            c.scale = scale;
            c
        }
        _ => best.cost.clone(),
    };
    Ok(SearchResult {
        best: best.solution,
        cost,
        mode: params.eval_mode,
        search_cost: best.cost,
        objective: best.objective,
        feasible,
        iterations,
        accepted,
        restarts,
        trace,
    })
}

fn verify(
    instance: &Instance,
    strategy: Strategy,
    solution: &FirstStageSolution,
    incremental: &ExpectedCost<f64>,
    iteration: u64,
) -> Result<(), SearchError> {
    let scratch = Evaluator::<f64>::new(instance, strategy, MemoryMode::Streaming).evaluate(solution)?;
    if scratch.total.to_bits() != incremental.total.to_bits() || scratch.per_request != incremental.per_request {
        return Err(SearchError::Inconsistent {
            iteration,
            incremental: incremental.total,
            scratch: scratch.total,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::random::{micro_instance, random_solution, MicroConfig};
    use crate::model::{validate_first_stage, Capacity, InstanceParts, PotentialRequest};

    fn line_instance(h: Time) -> Instance {
        // depot, w1, w2, c3, c4 with unit-ish distances
        let d = [
            [0, 2, 3, 3, 4],
            [2, 0, 2, 1, 2],
            [3, 2, 0, 2, 1],
            [3, 1, 2, 0, 2],
            [4, 2, 1, 2, 0],
        ];
        let req = |id, customer, reveal, p| PotentialRequest {
            id,
            customer,
            reveal,
            probability: p,
            demand: 1,
            service: 1,
            tw_start: reveal,
            tw_end: (reveal + 6).min(h),
        };
        Instance::new(InstanceParts {
            waiting_count: 2,
            customer_count: 2,
            horizon: h,
            fleet: 1,
            capacity: Capacity::Bounded(3),
            travel: d.iter().flatten().copied().collect(),
            requests: vec![
                req(0, 3, 4, 0.5),
                req(1, 4, 7, 0.7),
                req(2, 3, 12, 0.4),
                req(3, 4, 15, 0.9),
            ],
        })
        .unwrap()
    }

    #[test]
    fn zero_iterations_returns_start() {
        let problem = Problem::unscaled(line_instance(24));
        let mut start = FirstStageSolution::empty(1);
        start.routes[0] = vec![1];
        start.wait.insert(1, 10);
        let params = SearchParams {
            budget: Budget::Iterations(0),
            ..SearchParams::default()
        };
        let result = local_search(&problem, &start, &params).unwrap();
        assert_eq!(result.best, start);
        assert_eq!(result.iterations, 0);
        assert!(result.feasible);
    }

    #[test]
    fn non_positive_time_limit_is_refused() {
        let problem = Problem::unscaled(line_instance(24));
        let start = FirstStageSolution::empty(1);
        for s in [0.0, -1.0, f64::NAN] {
            let params = SearchParams {
                budget: Budget::Seconds(s),
                ..SearchParams::default()
            };
            assert!(matches!(
                local_search(&problem, &start, &params),
                Err(SearchError::Budget(_))
            ));
        }
    }

    #[test]
    fn bad_parameters_are_rejected() {
        let problem = Problem::unscaled(line_instance(24));
        let start = FirstStageSolution::empty(1);
        for params in [
            SearchParams {
                cooling: 1.0,
                ..SearchParams::default()
            },
            SearchParams {
                t_min: 3.0,
                ..SearchParams::default()
            },
        ] {
            assert!(matches!(
                local_search(&problem, &start, &params),
                Err(SearchError::InvalidParams(_))
            ));
        }
    }

    #[test]
    fn infeasible_start_is_repaired() {
        let instance = line_instance(16);
        let problem = Problem::unscaled(instance.clone());
        let mut start = FirstStageSolution::empty(1);
        start.routes[0] = vec![1];
        // returns at 1 + 2 + 18 + 2 = 23, overshoot 7
        start.wait.insert(1, 18);
        let report = validate_first_stage(&start, &instance);
        assert!(!report.is_valid());
        let params = SearchParams {
            budget: Budget::Iterations(500),
            seed: 4,
            ..SearchParams::default()
        };
        let result = local_search(&problem, &start, &params).unwrap();
        assert!(result.feasible);
        assert!(validate_first_stage(&result.best, &instance).is_valid());
        let start_obj = result.trace[0].current_cost;
        assert!(result.objective < start_obj);
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let problem = Problem::unscaled(line_instance(24));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let start = cold_start(&problem.instance, &problem.domain, &mut rng);
        let params = SearchParams {
            budget: Budget::Iterations(2000),
            seed: 11,
            ..SearchParams::default()
        };
        let a = local_search(&problem, &start, &params).unwrap();
        let b = local_search(&problem, &start, &params).unwrap();
        assert_eq!(a.best, b.best);
        assert_eq!(a.accepted, b.accepted);
        let strip = |t: &[TracePoint]| {
            t.iter()
                .map(|p| (p.iteration, p.current_cost.to_bits()))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&a.trace), strip(&b.trace));
        assert_eq!(a.restarts, 2000 / 283);
    }

    #[test]
    fn incremental_costs_match_scratch_during_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cfg = MicroConfig {
            max_waiting: 4,
            ..MicroConfig::default()
        };
        for seed in 0..20 {
            let instance = micro_instance(&mut rng, &cfg);
            let start = random_solution(&mut rng, &instance);
            let problem = Problem::unscaled(instance);
            for eval_mode in [EvalMode::Rq, EvalMode::RqPlus] {
                let params = SearchParams {
                    budget: Budget::Iterations(300),
                    seed,
                    eval_mode,
                    verify_every: Some(1),
                    ..SearchParams::default()
                };
                local_search(&problem, &start, &params).unwrap();
            }
        }
    }

    #[test]
    fn hybrid_reports_both_scores() {
        let problem = Problem::unscaled(line_instance(24));
        let start = cold_start(&problem.instance, &problem.domain, &mut ChaCha8Rng::seed_from_u64(2));
        let params = SearchParams {
            budget: Budget::Iterations(300),
            eval_mode: EvalMode::Hybrid,
            ..SearchParams::default()
        };
        let result = local_search(&problem, &start, &params).unwrap();
        let (rq, rqplus) = result.hybrid_scores().unwrap();
        assert_eq!(result.search_cost.strategy, Strategy::Rq);
        assert_eq!(result.cost.strategy, Strategy::RqPlus);
        let both = evaluate_hybrid(&problem.instance, &result.best).unwrap();
        assert_eq!(both.rq.total, rq);
        assert_eq!(both.rqplus.total, rqplus);
    }

    #[test]
    fn cold_start_uses_distinct_vertices_with_fitting_waits() {
        let instance = line_instance(24);
        let domain = WaitDomain::new(vec![5, 10, 15, 20]).unwrap();
        let s = cold_start(&instance, &domain, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(s.visited_count(), 1);
        let w = s.routes[0][0];
        // slack = 24 - 1 - round trip (4 or 6)
        assert_eq!(s.wait[&w], 15);
        assert!(validate_first_stage(&s, &instance).is_valid());
    }
}
