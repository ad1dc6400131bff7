//! Without time windows and with unit demands, the load distribution seen
//! by consecutive requests of a route follows the classic capacitated
//! recursion `f'(r, q) = p · f'(r⁻, q − 1) + (1 − p) · f'(r⁻, q)` where `p`
//! is the probability of the previous request `r⁻`.

use super::engine::{Ctx, Stop};
use super::EvalError;
use crate::model::{Capacity, Plan, RequestId, Strategy};
use crate::scalar::Probability;

/// Residual accepted by [`unit_demand_load_distribution`].
pub const RECURSION_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct LoadTable<T> {
    /// Requests of the route, in request order.
    pub requests: Vec<RequestId>,
    /// `rows[i][q]`: probability that the vehicle carries `q` units when
    /// `requests[i]` is considered.
    pub rows: Vec<Vec<T>>,
    /// Largest deviation from the recursion.
    pub max_residual: f64,
}

/// Load distribution per request of route `k`, read from the round-trip
/// engine's layers (summed over time) and checked against the recursion.
///
/// Refuses unless every request of the route has demand 1, reveal time
/// and window start 1, the capacity is at least the route's request count
/// and every request is satisfiable even after all earlier requests of its
/// waiting vertex were served.
pub fn unit_demand_load_distribution<T: Probability>(plan: &Plan<'_>, k: usize) -> Result<LoadTable<T>, EvalError> {
    if plan.strategy() != Strategy::Rq {
        return Err(EvalError::StrategyMismatch {
            expected: Strategy::Rq,
            found: plan.strategy(),
        });
    }
    let instance = plan.instance;
    let route_requests = plan.assignment.requests_on_route(k);
    match instance.capacity() {
        Capacity::Bounded(q) if q as usize >= route_requests.len() => {}
        _ => {
            return Err(EvalError::Precondition(
                "capacity must be bounded and never binding".into(),
            ))
        }
    }
    let ctx = Ctx::new(instance, &plan.schedule, Strategy::Rq);
    let mut requests = Vec::new();
    let mut rows = Vec::new();
    let mut loads = vec![T::zero(); ctx.load_levels()];
    loads[0] = T::one();
    for &w in &plan.solution.routes[k] {
        let at_w = plan.assignment.requests_at(w);
        if at_w.is_empty() {
            continue;
        }
        let mut latest = plan.schedule.arrival(w);
        for &r in at_w {
            let req = instance.request(r);
            if req.demand != 1 || req.reveal != 1 || req.tw_start != 1 {
                return Err(EvalError::Precondition(format!(
                    "request {r} needs unit demand and no reveal time or window start"
                )));
            }
            let window = plan.assignment.window(r);
            if latest.max(window.min) > window.max {
                return Err(EvalError::Precondition(format!(
                    "request {r} is not always satisfiable"
                )));
            }
            latest = latest.max(window.min)
                + instance.travel(w, req.customer)
                + req.service
                + instance.travel(req.customer, w);
        }
        let stop = Stop::of(&plan.schedule, w);
        let mut layers = vec![ctx.arrival_layer(&stop, &loads)];
        let mut accept = Vec::new();
        ctx.run(&stop, at_w, 0, &mut layers, &mut accept, true);
        for (i, &r) in at_w.iter().enumerate() {
            requests.push(r);
            rows.push(layers[i].load_marginal());
        }
        loads = layers.last().expect("final layer").load_marginal();
    }

    let mut max_residual = 0.0f64;
    if let Some(first) = rows.first() {
        for (q, x) in first.iter().enumerate() {
            let expected = if q == 0 { 1.0 } else { 0.0 };
            max_residual = max_residual.max((x.to_f64() - expected).abs());
        }
    }
    for i in 1..rows.len() {
        let p = T::from_f64(instance.request(requests[i - 1]).probability);
        let np = T::one() - p.clone();
        let prev = &rows[i - 1];
        for (q, x) in rows[i].iter().enumerate() {
            let mut expected = np.clone() * prev[q].clone();
            if q > 0 {
                expected += p.clone() * prev[q - 1].clone();
            }
            max_residual = max_residual.max((x.clone() - expected).to_f64().abs());
        }
    }
    if max_residual > RECURSION_TOLERANCE {
        return Err(EvalError::RecursionMismatch { residual: max_residual });
    }
    Ok(LoadTable {
        requests,
        rows,
        max_residual,
    })
}
