use std::collections::BTreeMap;
use std::fmt;

use super::schedule::DEPOT_DEPARTURE;
use super::{FirstStageSolution, Instance, Time, Vertex, DEPOT};

/// One violated first-stage constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// More routes than vehicles.
    FleetSize {
        routes: usize,
        fleet: usize,
    },
    /// A route visits something that is not a waiting vertex.
    UnknownVertex {
        route: usize,
        vertex: Vertex,
    },
    /// A waiting vertex appears more than once across all routes.
    VertexReuse {
        vertex: Vertex,
        routes: Vec<usize>,
    },
    MissingWait {
        vertex: Vertex,
    },
    /// A waiting time outside `[1, h]`.
    WaitOutOfRange {
        vertex: Vertex,
        wait: Time,
    },
    /// A waiting time given for a vertex no route visits.
    UnusedWait {
        vertex: Vertex,
    },
    /// The route returns to the depot after the horizon.
    Horizon {
        route: usize,
        overshoot: Time,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::FleetSize { routes, fleet } => write!(f, "fleet-size: {routes} routes for {fleet} vehicles"),
            Violation::UnknownVertex { route, vertex } => write!(f, "unknown-vertex: route {route} visits {vertex}"),
            Violation::VertexReuse { vertex, routes } => write!(f, "vertex-reuse: {vertex} on routes {routes:?}"),
            Violation::MissingWait { vertex } => write!(f, "missing-wait: {vertex}"),
            Violation::WaitOutOfRange { vertex, wait } => write!(f, "wait-range: {vertex} waits {wait}"),
            Violation::UnusedWait { vertex } => write!(f, "unused-wait: {vertex}"),
            Violation::Horizon { route, overshoot } => write!(f, "horizon: route {route} overshoot {overshoot}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every first-stage constraint and lists the violated ones. Unlike
/// [`super::compute_schedule`] this never fails; the route durations are
/// summed directly from the travel matrix.
pub fn validate_first_stage(solution: &FirstStageSolution, instance: &Instance) -> ValidationReport {
    let mut violations = Vec::new();
    if solution.routes.len() > instance.fleet() {
        violations.push(Violation::FleetSize {
            routes: solution.routes.len(),
            fleet: instance.fleet(),
        });
    }
    let mut seen: BTreeMap<Vertex, Vec<usize>> = BTreeMap::new();
    for (k, route) in solution.routes.iter().enumerate() {
        for &w in route {
            if !instance.is_waiting_vertex(w) {
                violations.push(Violation::UnknownVertex { route: k, vertex: w });
            } else {
                seen.entry(w).or_default().push(k);
            }
        }
    }
    for (&w, routes) in &seen {
        if routes.len() > 1 {
            violations.push(Violation::VertexReuse {
                vertex: w,
                routes: routes.clone(),
            });
        }
        match solution.wait_of(w) {
            None => violations.push(Violation::MissingWait { vertex: w }),
            Some(tau) if tau < 1 || tau > instance.horizon() => {
                violations.push(Violation::WaitOutOfRange { vertex: w, wait: tau })
            }
            Some(_) => {}
        }
    }
    for &w in solution.wait.keys() {
        if !seen.contains_key(&w) {
            violations.push(Violation::UnusedWait { vertex: w });
        }
    }
    let nv = instance.vertex_count();
    for (k, route) in solution.routes.iter().enumerate() {
        if route.is_empty() || route.iter().any(|&w| w >= nv) {
            continue;
        }
        let mut end = DEPOT_DEPARTURE;
        let mut prev = DEPOT;
        for &w in route {
            end += instance.travel(prev, w) + solution.wait_of(w).unwrap_or(0).max(0);
            prev = w;
        }
        end += instance.travel(prev, DEPOT);
        if end > instance.horizon() {
            violations.push(Violation::Horizon {
                route: k,
                overshoot: end - instance.horizon(),
            });
        }
    }
    ValidationReport { violations }
}
