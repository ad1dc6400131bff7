use super::{FirstStageSolution, Instance, ModelError, Time, Vertex, DEPOT};

/// Time at which every vehicle leaves the depot.
pub const DEPOT_DEPARTURE: Time = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Visit {
    pub vertex: Vertex,
    /// Planned arrival at the waiting vertex.
    pub arrival: Time,
    /// Planned departure, `arrival + wait`.
    pub departure: Time,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouteTimes {
    pub visits: Vec<Visit>,
    /// Planned arrival back at the depot.
    pub return_time: Time,
    /// Amount by which the return exceeds the horizon (0 when feasible).
    pub overshoot: Time,
}

/// Arrival/departure times of every visited waiting vertex.
///
/// Vehicles leave the depot at time 1, so the first visited vertex is
/// reached at `1 + d(0, w)`; every later arrival is the previous departure
/// plus the travel time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouteSchedule {
    routes: Vec<RouteTimes>,
    /// `(route, position)` per vertex id.
    index: Vec<Option<(usize, usize)>>,
}

/// Computes planned times for every route. Horizon violations are reported
/// through [`RouteTimes::overshoot`], not rejected.
pub fn compute_schedule(solution: &FirstStageSolution, instance: &Instance) -> Result<RouteSchedule, ModelError> {
    let mut index = vec![None; instance.vertex_count()];
    let mut routes = Vec::with_capacity(solution.routes.len());
    for (k, route) in solution.routes.iter().enumerate() {
        let mut visits = Vec::with_capacity(route.len());
        let mut previous = DEPOT;
        let mut clock = DEPOT_DEPARTURE;
        for (pos, &w) in route.iter().enumerate() {
            if !instance.is_waiting_vertex(w) {
                return Err(ModelError::UnknownWaitingVertex(w));
            }
            if index[w].is_some() {
                return Err(ModelError::DuplicateVertex(w));
            }
            let tau = solution.wait_of(w).ok_or(ModelError::MissingWait(w))?;
            if tau < 1 {
                return Err(ModelError::InvalidWait { vertex: w, wait: tau });
            }
            index[w] = Some((k, pos));
            let arrival = clock + instance.travel(previous, w);
            let departure = arrival + tau;
            visits.push(Visit {
                vertex: w,
                arrival,
                departure,
            });
            previous = w;
            clock = departure;
        }
        let return_time = if route.is_empty() {
            DEPOT_DEPARTURE
        } else {
            clock + instance.travel(previous, DEPOT)
        };
        routes.push(RouteTimes {
            visits,
            return_time,
            overshoot: (return_time - instance.horizon()).max(0),
        });
    }
    Ok(RouteSchedule { routes, index })
}

impl RouteSchedule {
    pub fn routes(&self) -> &[RouteTimes] {
        &self.routes
    }

    pub fn route(&self, k: usize) -> &RouteTimes {
        &self.routes[k]
    }

    /// `(route, position)` of a visited waiting vertex.
    #[inline]
    pub fn locate(&self, w: Vertex) -> Option<(usize, usize)> {
        self.index.get(w).copied().flatten()
    }

    #[inline]
    pub fn visit(&self, w: Vertex) -> Option<&Visit> {
        self.locate(w).map(|(k, p)| &self.routes[k].visits[p])
    }

    pub fn is_visited(&self, w: Vertex) -> bool {
        self.locate(w).is_some()
    }

    /// Planned arrival at `w`.
    #[inline]
    pub fn arrival(&self, w: Vertex) -> Time {
        self.visit(w).expect("visited waiting vertex").arrival
    }

    /// Planned departure from `w`.
    #[inline]
    pub fn departure(&self, w: Vertex) -> Time {
        self.visit(w).expect("visited waiting vertex").departure
    }

    /// Vertex following `w` on its route (the depot after the last one) and
    /// the planned arrival time there.
    pub fn successor(&self, w: Vertex) -> (Vertex, Time) {
        let (k, p) = self.locate(w).expect("visited waiting vertex");
        let route = &self.routes[k];
        match route.visits.get(p + 1) {
            Some(next) => (next.vertex, next.arrival),
            None => (DEPOT, route.return_time),
        }
    }

    pub fn total_overshoot(&self) -> Time {
        self.routes.iter().map(|r| r.overshoot).sum()
    }

    pub fn is_feasible(&self) -> bool {
        self.total_overshoot() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Capacity, InstanceParts};
    use std::collections::BTreeMap;

    /// Depot, two waiting vertices, one customer.
    fn instance(h: Time) -> Instance {
        #[rustfmt::skip]
        let travel = vec![
            0, 2, 3, 1,
            2, 0, 4, 1,
            3, 4, 0, 1,
            1, 1, 1, 0,
        ];
        Instance::new(InstanceParts {
            waiting_count: 2,
            customer_count: 1,
            horizon: h,
            fleet: 2,
            capacity: Capacity::Unbounded,
            travel,
            requests: vec![],
        })
        .unwrap()
    }

    fn solution(routes: Vec<Vec<Vertex>>, wait: &[(Vertex, Time)]) -> FirstStageSolution {
        FirstStageSolution {
            routes,
            wait: wait.iter().copied().collect::<BTreeMap<_, _>>(),
        }
    }

    #[test]
    fn single_vertex_route() {
        #[rustfmt::skip]
        let travel = vec![
            0, 3,
            3, 0,
        ];
        let inst = Instance::new(InstanceParts {
            waiting_count: 1,
            customer_count: 0,
            horizon: 480,
            fleet: 1,
            capacity: Capacity::Unbounded,
            travel,
            requests: vec![],
        })
        .unwrap();
        let s = compute_schedule(&solution(vec![vec![1]], &[(1, 10)]), &inst).unwrap();
        assert_eq!(s.arrival(1), 4);
        assert_eq!(s.departure(1), 14);
    }

    #[test]
    fn empty_route_is_feasible() {
        let s = compute_schedule(&solution(vec![vec![], vec![]], &[]), &instance(5)).unwrap();
        assert!(s.routes()[0].visits.is_empty());
        assert!(s.is_feasible());
    }

    #[test]
    fn two_vertex_route_recurrence() {
        let s = compute_schedule(&solution(vec![vec![1, 2]], &[(1, 5), (2, 6)]), &instance(480)).unwrap();
        assert_eq!((s.arrival(1), s.departure(1)), (3, 8));
        assert_eq!((s.arrival(2), s.departure(2)), (12, 18));
        assert_eq!(s.routes()[0].return_time, 21);
        assert!(s.is_feasible());
        assert_eq!(s.successor(1), (2, 12));
        assert_eq!(s.successor(2), (DEPOT, 21));
    }

    #[test]
    fn overshoot_is_reported_not_rejected() {
        let s = compute_schedule(&solution(vec![vec![1, 2]], &[(1, 5), (2, 6)]), &instance(14)).unwrap();
        assert_eq!(s.routes()[0].overshoot, 7);
        assert!(!s.is_feasible());
    }

    #[test]
    fn structural_errors() {
        let inst = instance(100);
        assert!(matches!(
            compute_schedule(&solution(vec![vec![3]], &[(3, 1)]), &inst),
            Err(ModelError::UnknownWaitingVertex(3))
        ));
        assert!(matches!(
            compute_schedule(&solution(vec![vec![1], vec![1]], &[(1, 1)]), &inst),
            Err(ModelError::DuplicateVertex(1))
        ));
        assert!(matches!(
            compute_schedule(&solution(vec![vec![1]], &[]), &inst),
            Err(ModelError::MissingWait(1))
        ));
        assert!(matches!(
            compute_schedule(&solution(vec![vec![1]], &[(1, 0)]), &inst),
            Err(ModelError::InvalidWait { .. })
        ));
    }
}
