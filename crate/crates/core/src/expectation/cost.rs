use std::collections::HashMap;
use std::io::{self, Write};

use super::engine::{Ctx, Stop};
use super::incremental::{EvalStats, VertexRun};
use super::layer::Layer;
use super::EvalError;
use crate::model::{Instance, Plan, RequestId, Strategy, Time, Vertex};
use crate::scalar::{CompensatedSum, Probability};

/// Temporal scale at which a cost was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ScaleTag {
    pub alpha: i64,
    pub beta: i64,
}

impl Default for ScaleTag {
    fn default() -> Self {
        Self { alpha: 1, beta: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MemoryMode {
    /// Keep every layer (needed for incremental updates).
    Full,
    /// Keep only the current layer.
    Streaming,
}

/// Expected number of rejected requests and its per-request breakdown.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpectedCost<T> {
    pub total: T,
    /// Probability that each request is accepted, indexed by request id.
    pub per_request: Vec<T>,
    pub strategy: Strategy,
    pub scale: ScaleTag,
    /// Sum of route horizon overshoots of the evaluated solution.
    pub overshoot: Time,
}

impl<T: Probability> ExpectedCost<T> {
    pub fn is_feasible(&self) -> bool {
        self.overshoot == 0
    }

    pub fn to_f64(&self) -> ExpectedCost<f64> {
        ExpectedCost {
            total: self.total.to_f64(),
            per_request: self.per_request.iter().map(Probability::to_f64).collect(),
            strategy: self.strategy,
            scale: self.scale,
            overshoot: self.overshoot,
        }
    }

    /// Writes `request,p,pr_accept` rows.
    pub fn write_csv<W: Write>(&self, instance: &Instance, mut out: W) -> io::Result<()> {
        writeln!(out, "request,p,pr_accept")?;
        for (r, pr) in self.per_request.iter().enumerate() {
            writeln!(out, "{r},{},{}", instance.request(r).probability, pr.to_f64())?;
        }
        Ok(())
    }
}

/// `sum_r (p_r - Pr{r accepted})`, accumulated in request id order.
pub(crate) fn rejected_total<T: Probability>(instance: &Instance, per_request: &[T]) -> T {
    let mut sum = CompensatedSum::new();
    for (req, pr) in instance.requests().iter().zip(per_request) {
        sum.add(T::from_f64(req.probability) - pr.clone());
    }
    sum.value()
}

/// Evaluates a plan route by route. With a cache, stops whose inputs match
/// a cached run reuse its layers.
pub(crate) fn evaluate_plan<T: Probability>(
    plan: &Plan<'_>,
    keep: bool,
    mut cache: Option<&mut HashMap<Vertex, Vec<VertexRun<T>>>>,
    stats: &mut EvalStats,
) -> ExpectedCost<T> {
    let instance = plan.instance;
    let ctx = Ctx::new(instance, &plan.schedule, plan.strategy());
    let mut per_request = vec![T::zero(); instance.requests().len()];
    for route in &plan.solution.routes {
        let mut loads = vec![T::zero(); ctx.load_levels()];
        loads[0] = T::one();
        for &w in route {
            let requests = plan.assignment.requests_at(w);
            if requests.is_empty() {
                continue;
            }
            let stop = Stop::of(&plan.schedule, w);
            let run = match cache.as_deref_mut() {
                Some(cache) => {
                    let runs = cache.entry(w).or_default();
                    super::incremental::obtain(&ctx, runs, stop, requests, &loads, stats);
                    &runs[0]
                }
                None => {
                    let mut layers = vec![ctx.arrival_layer(&stop, &loads)];
                    let mut accept = Vec::with_capacity(requests.len());
                    ctx.run(&stop, requests, 0, &mut layers, &mut accept, keep);
                    stats.requests_computed += requests.len() as u64;
                    for (&r, pr) in requests.iter().zip(accept) {
                        per_request[r] = pr;
                    }
                    loads = layers.last().expect("final layer").load_marginal();
                    continue;
                }
            };
            for (&r, pr) in requests.iter().zip(&run.accept) {
                per_request[r] = pr.clone();
            }
            loads = run.layers.last().expect("final layer").load_marginal();
        }
    }
    stats.evaluations += 1;
    ExpectedCost {
        total: rejected_total(instance, &per_request),
        per_request,
        strategy: plan.strategy(),
        scale: ScaleTag::default(),
        overshoot: plan.schedule.total_overshoot(),
    }
}

/// Expected cost under the round-trip strategy.
pub fn expected_cost_rq<T: Probability>(plan: &Plan<'_>) -> Result<ExpectedCost<T>, EvalError> {
    check_strategy(plan, Strategy::Rq)?;
    Ok(evaluate_plan(plan, false, None, &mut EvalStats::default()))
}

/// Expected cost under the chaining strategy. Both memory modes give the
/// same result; `Full` keeps every layer alive during the evaluation.
pub fn expected_cost_rqplus<T: Probability>(plan: &Plan<'_>, mode: MemoryMode) -> Result<ExpectedCost<T>, EvalError> {
    check_strategy(plan, Strategy::RqPlus)?;
    Ok(evaluate_plan(
        plan,
        mode == MemoryMode::Full,
        None,
        &mut EvalStats::default(),
    ))
}

/// Expected cost under the plan's own strategy.
pub fn expected_cost<T: Probability>(plan: &Plan<'_>) -> ExpectedCost<T> {
    evaluate_plan(plan, false, None, &mut EvalStats::default())
}

fn check_strategy(plan: &Plan<'_>, expected: Strategy) -> Result<(), EvalError> {
    if plan.strategy() != expected {
        return Err(EvalError::StrategyMismatch {
            expected,
            found: plan.strategy(),
        });
    }
    Ok(())
}

/// Layers of one request: the availability distribution `f` when the
/// request is considered, the departure distribution `g1` (the request
/// appeared and the vehicle leaves to serve it, if allowed) and the discard
/// distribution `g2` (the request did not appear).
#[derive(Clone, Debug)]
pub struct RequestLayers<T> {
    pub request: RequestId,
    pub f: Layer<T>,
    pub g1: Layer<T>,
    pub g2: Layer<T>,
}

/// All layers of a plan, for inspection.
pub fn probability_layers<T: Probability>(plan: &Plan<'_>) -> Vec<RequestLayers<T>> {
    let mut out = Vec::new();
    visit_probability_layers(plan, |layers| out.push(layers));
    out
}

/// Hands the layers of every request to `visit`, route by route, keeping
/// only one waiting vertex's layers alive at a time.
pub fn visit_probability_layers<T: Probability>(plan: &Plan<'_>, mut visit: impl FnMut(RequestLayers<T>)) {
    let instance = plan.instance;
    let ctx = Ctx::new(instance, &plan.schedule, plan.strategy());
    for route in &plan.solution.routes {
        let mut loads = vec![T::zero(); ctx.load_levels()];
        loads[0] = T::one();
        for &w in route {
            let requests = plan.assignment.requests_at(w);
            if requests.is_empty() {
                continue;
            }
            let stop = Stop::of(&plan.schedule, w);
            let mut layers = vec![ctx.arrival_layer(&stop, &loads)];
            let mut accept = Vec::new();
            ctx.run(&stop, requests, 0, &mut layers, &mut accept, true);
            for (i, &r) in requests.iter().enumerate() {
                let f = &layers[i];
                let (g1, g2) = departure_layers(plan, &ctx, w, requests, i, f);
                visit(RequestLayers {
                    request: r,
                    f: Layer::clone(f),
                    g1,
                    g2,
                });
            }
            loads = layers.last().expect("final layer").load_marginal();
        }
    }
}

fn departure_layers<T: Probability>(
    plan: &Plan<'_>,
    ctx: &Ctx<'_>,
    w: Vertex,
    requests: &[RequestId],
    i: usize,
    f: &Layer<T>,
) -> (Layer<T>, Layer<T>) {
    let instance = plan.instance;
    let r = requests[i];
    let req = instance.request(r);
    let p = T::from_f64(req.probability);
    let np = T::one() - p.clone();
    let windows: Vec<_> = (0..f.locs)
        .map(|li| {
            let v = if li == 0 {
                w
            } else {
                instance.request(requests[li - 1]).customer
            };
            crate::model::feasibility_window(plan.strategy(), instance, &plan.schedule, r, w, v)
        })
        .collect();
    let t_end = ctx.late;
    let nt = (t_end - f.t0 + 1).max(0) as usize;
    let mut g1 = Layer::zeros(f.locs, f.t0, nt, f.nq);
    let mut g2 = Layer::zeros(f.locs, f.t0, nt, f.nq);
    for li in 0..f.locs {
        for t in f.times() {
            let dep = t.max(windows[li].min).min(t_end);
            let gone = t.max(req.reveal).min(t_end);
            for (q, x) in f.row(li, t).iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                g1.row_mut(li, dep)[q] += p.clone() * x.clone();
                g2.row_mut(li, gone)[q] += np.clone() * x.clone();
            }
        }
    }
    (g1, g2)
}
