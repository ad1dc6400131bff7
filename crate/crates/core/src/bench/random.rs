//! Small random instances and solutions for oracle comparisons.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{Capacity, FirstStageSolution, Instance, InstanceParts, PotentialRequest, Time, Vertex, DEPOT};

/// Size limits of [`micro_instance`].
#[derive(Clone, Copy, Debug)]
pub struct MicroConfig {
    pub max_customers: usize,
    pub max_waiting: usize,
    pub max_horizon: Time,
    pub max_fleet: usize,
    pub max_capacity: u32,
    pub max_requests: usize,
    /// Upper bound on requests with `0 < p < 1`.
    pub max_uncertain: usize,
}

impl Default for MicroConfig {
    fn default() -> Self {
        Self {
            max_customers: 4,
            max_waiting: 3,
            max_horizon: 30,
            max_fleet: 2,
            max_capacity: 3,
            max_requests: 14,
            max_uncertain: 12,
        }
    }
}

/// Random instance within the limits of `cfg`. Travel times are
/// asymmetric and need not satisfy the triangle inequality; a quarter of
/// the instances have unbounded capacity.
pub fn micro_instance<R: Rng>(rng: &mut R, cfg: &MicroConfig) -> Instance {
    let n = rng.random_range(1..=cfg.max_customers);
    let m = rng.random_range(1..=cfg.max_waiting);
    let h = rng.random_range(12.min(cfg.max_horizon)..=cfg.max_horizon);
    let fleet = rng.random_range(1..=cfg.max_fleet);
    let capacity = if rng.random_bool(0.25) {
        Capacity::Unbounded
    } else {
        Capacity::Bounded(rng.random_range(1..=cfg.max_capacity))
    };
    let nv = 1 + m + n;
    let mut travel = vec![0; nv * nv];
    for i in 0..nv {
        for j in 0..nv {
            if i != j {
                travel[i * nv + j] = rng.random_range(0..=5);
            }
        }
    }
    let max_demand = match capacity {
        Capacity::Bounded(q) => q.min(2),
        Capacity::Unbounded => 2,
    };
    let mut pairs: Vec<(Vertex, Time)> = (m + 1..=m + n).flat_map(|c| (1..=h).map(move |g| (c, g))).collect();
    pairs.shuffle(rng);
    let wanted = rng.random_range(1..=cfg.max_requests.min(pairs.len()));
    let mut uncertain = 0;
    let mut requests = Vec::with_capacity(wanted);
    for &(customer, reveal) in pairs.iter().take(wanted) {
        let probability = match rng.random_range(0..10) {
            0 => 0.0,
            1 => 1.0,
            _ if uncertain >= cfg.max_uncertain => 1.0,
            2 => 0.5,
            _ => (rng.random_range(1..20) as f64) / 20.0,
        };
        if probability > 0.0 && probability < 1.0 {
            uncertain += 1;
        }
        let tw_start = (reveal + rng.random_range(0..=3)).min(h);
        let tw_end = (tw_start + rng.random_range(0..=10)).min(h);
        requests.push(PotentialRequest {
            id: requests.len(),
            customer,
            reveal,
            probability,
            demand: rng.random_range(0..=max_demand),
            service: rng.random_range(0..=3),
            tw_start,
            tw_end,
        });
    }
    Instance::new(InstanceParts {
        waiting_count: m,
        customer_count: n,
        horizon: h,
        fleet,
        capacity,
        travel,
        requests,
    })
    .expect("generated micro instance is valid")
}

/// Random solution: every waiting vertex is left out or put on a random
/// route at a random position, and the remaining horizon slack of each
/// route is split randomly into waiting times (at least 1 each). Routes
/// whose travel alone exceeds the horizon stay infeasible.
pub fn random_solution<R: Rng>(rng: &mut R, instance: &Instance) -> FirstStageSolution {
    let mut solution = FirstStageSolution::empty(instance.fleet());
    let mut vertices: Vec<Vertex> = instance.waiting_vertices().collect();
    vertices.shuffle(rng);
    for w in vertices {
        if rng.random_bool(0.25) {
            continue;
        }
        let k = rng.random_range(0..instance.fleet());
        let pos = rng.random_range(0..=solution.routes[k].len());
        solution.routes[k].insert(pos, w);
    }
    for k in 0..solution.routes.len() {
        let route = solution.routes[k].clone();
        if route.is_empty() {
            continue;
        }
        let travel: Time = route_travel(instance, &route);
        let budget = (instance.horizon() - 1 - travel).max(route.len() as Time);
        let mut waits = vec![1; route.len()];
        let extra = rng.random_range(0..=budget - route.len() as Time);
        for _ in 0..extra {
            let i = rng.random_range(0..waits.len());
            waits[i] += 1;
        }
        for (&w, tau) in route.iter().zip(waits) {
            solution.wait.insert(w, tau);
        }
    }
    solution
}

/// Total travel time of a route from and back to the depot.
pub fn route_travel(instance: &Instance, route: &[Vertex]) -> Time {
    if route.is_empty() {
        return 0;
    }
    let mut prev = DEPOT;
    let mut total = 0;
    for &w in route {
        total += instance.travel(prev, w);
        prev = w;
    }
    total + instance.travel(prev, DEPOT)
}
