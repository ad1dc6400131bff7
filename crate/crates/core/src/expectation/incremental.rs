use std::collections::HashMap;
use std::sync::Arc;

use super::cost::{evaluate_plan, ExpectedCost, MemoryMode};
use super::engine::{Ctx, StepKey, Stop};
use super::layer::Layer;
use super::EvalError;
use crate::model::{FirstStageSolution, Instance, Plan, RequestId, Strategy, Vertex};
use crate::scalar::Probability;

/// Runs kept per waiting vertex. Two entries cover the current solution
/// and one candidate.
const RUNS_PER_VERTEX: usize = 2;

/// Cached recursion of one waiting vertex.
pub(crate) struct VertexRun<T> {
    arrival: crate::model::Time,
    load_in: Vec<T>,
    keys: Vec<StepKey>,
    /// Availability distribution per request, plus the final one.
    pub layers: Vec<Arc<Layer<T>>>,
    pub accept: Vec<T>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalStats {
    pub evaluations: u64,
    /// Request steps actually computed.
    pub requests_computed: u64,
    /// Request steps taken over from a cached run.
    pub requests_reused: u64,
}

/// Makes `runs[0]` the run for (`stop`, `requests`, `loads`), reusing the
/// longest prefix of a cached run whose steps read the same inputs. A wait
/// change keeps every request whose window ends before the departure
/// matters.
pub(crate) fn obtain<T: Probability>(
    ctx: &Ctx<'_>,
    runs: &mut Vec<VertexRun<T>>,
    stop: Stop,
    requests: &[RequestId],
    loads: &[T],
    stats: &mut EvalStats,
) {
    let n = requests.len();
    let keys: Vec<StepKey> = requests.iter().map(|&r| ctx.step_key(&stop, r)).collect();
    let best = runs
        .iter()
        .enumerate()
        .filter(|(_, run)| run.arrival == stop.arrival && run.load_in == loads)
        .map(|(i, run)| {
            let common = run.keys.iter().zip(&keys).take_while(|(a, b)| a == b).count();
            (common, i)
        })
        .max_by_key(|&(common, i)| (common, std::cmp::Reverse(i)));

    if let Some((common, i)) = best {
        if common == n && runs[i].keys.len() == n {
            let run = runs.remove(i);
            runs.insert(0, run);
            stats.requests_reused += n as u64;
            return;
        }
    }

    // The chaining strategy's last step depends on the next request's
    // reveal time, so the step before the first difference is redone too.
    let start = match (best, ctx.strategy) {
        (Some((common, _)), Strategy::Rq) => common,
        (Some((common, _)), Strategy::RqPlus) => common.saturating_sub(1),
        (None, _) => 0,
    };
    let (mut layers, mut accept) = match best {
        Some((_, i)) => (runs[i].layers[..=start].to_vec(), runs[i].accept[..start].to_vec()),
        None => (vec![ctx.arrival_layer(&stop, loads)], Vec::with_capacity(n)),
    };
    ctx.run(&stop, requests, start, &mut layers, &mut accept, true);
    stats.requests_reused += start as u64;
    stats.requests_computed += (n - start) as u64;
    runs.insert(
        0,
        VertexRun {
            arrival: stop.arrival,
            load_in: loads.to_vec(),
            keys,
            layers,
            accept,
        },
    );
    runs.truncate(RUNS_PER_VERTEX);
}

/// Expected-cost evaluator that remembers the recursion of every waiting
/// vertex and, on [`Evaluator::update`], recomputes only what the new
/// solution changed: the steps of a waiting vertex are reused while its
/// arrival time, the load distribution reaching it and the inputs of a
/// prefix of its requests are unchanged. Results are bit-identical to a fresh evaluation.
pub struct Evaluator<'a, T> {
    instance: &'a Instance,
    strategy: Strategy,
    mode: MemoryMode,
    cache: HashMap<Vertex, Vec<VertexRun<T>>>,
    stats: EvalStats,
}

impl<'a, T: Probability> Evaluator<'a, T> {
    pub fn new(instance: &'a Instance, strategy: Strategy, mode: MemoryMode) -> Self {
        Self {
            instance,
            strategy,
            mode,
            cache: HashMap::new(),
            stats: EvalStats::default(),
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn stats(&self) -> EvalStats {
        self.stats
    }

    pub fn clear(&mut self) {
        self.cache.clear();
    }

    /// Evaluates from scratch. In full mode the cache is rebuilt from this
    /// solution.
    pub fn evaluate(&mut self, solution: &FirstStageSolution) -> Result<ExpectedCost<T>, EvalError> {
        let plan = Plan::new(self.strategy, self.instance, solution)?;
        Ok(match self.mode {
            MemoryMode::Full => {
                self.cache.clear();
                evaluate_plan(&plan, true, Some(&mut self.cache), &mut self.stats)
            }
            MemoryMode::Streaming => evaluate_plan(&plan, false, None, &mut self.stats),
        })
    }

    /// Evaluates reusing cached layers. Streaming mode keeps no layers and
    /// refuses.
    pub fn update(&mut self, solution: &FirstStageSolution) -> Result<ExpectedCost<T>, EvalError> {
        if self.mode == MemoryMode::Streaming {
            return Err(EvalError::UnsupportedMode);
        }
        let plan = Plan::new(self.strategy, self.instance, solution)?;
        Ok(evaluate_plan(&plan, true, Some(&mut self.cache), &mut self.stats))
    }
}
