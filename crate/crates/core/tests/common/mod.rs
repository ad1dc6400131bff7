#![allow(dead_code)]

use ssvrptw::model::{Capacity, FirstStageSolution, Instance, InstanceParts, PotentialRequest, Time, Vertex};

/// Request on `customer` revealed at `reveal` with window `[reveal, l]`.
pub fn req(customer: Vertex, reveal: Time, l: Time, p: f64) -> PotentialRequest {
    PotentialRequest {
        id: 0,
        customer,
        reveal,
        probability: p,
        demand: 1,
        service: 1,
        tw_start: reveal,
        tw_end: l,
    }
}

/// Instance with travel time `travel(i, j)` between distinct vertices.
pub fn instance(
    m: usize,
    n: usize,
    h: Time,
    fleet: usize,
    capacity: Capacity,
    travel: impl Fn(usize, usize) -> Time,
    mut requests: Vec<PotentialRequest>,
) -> Instance {
    let nv = 1 + m + n;
    let mut d = vec![0; nv * nv];
    for i in 0..nv {
        for j in 0..nv {
            if i != j {
                d[i * nv + j] = travel(i, j);
            }
        }
    }
    for (i, r) in requests.iter_mut().enumerate() {
        r.id = i;
    }
    Instance::new(InstanceParts {
        waiting_count: m,
        customer_count: n,
        horizon: h,
        fleet,
        capacity,
        travel: d,
        requests,
    })
    .unwrap()
}

pub fn solution(routes: &[&[(Vertex, Time)]]) -> FirstStageSolution {
    let mut s = FirstStageSolution::empty(routes.len());
    for (k, route) in routes.iter().enumerate() {
        for &(w, tau) in route.iter() {
            s.routes[k].push(w);
            s.wait.insert(w, tau);
        }
    }
    s
}
