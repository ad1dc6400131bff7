use std::fmt;
use std::str::FromStr;

use super::{FirstStageSolution, Instance, RequestId, RouteSchedule, Time, Vertex};

/// Recourse strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    /// Every service is a round trip from the waiting vertex.
    Rq,
    /// Vehicles may chain services and leave directly for the next waiting
    /// vertex from a customer.
    RqPlus,
}

impl Strategy {
    pub const ALL: [Strategy; 2] = [Strategy::Rq, Strategy::RqPlus];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Rq => "rq",
            Strategy::RqPlus => "rqplus",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rq" => Ok(Strategy::Rq),
            "rqplus" | "rq+" => Ok(Strategy::RqPlus),
            other => Err(format!("unknown strategy '{other}'")),
        }
    }
}

/// Departure window `[min, max]`; empty when `min > max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub min: Time,
    pub max: Time,
}

impl Window {
    pub const EMPTY: Window = Window { min: 1, max: 0 };

    #[inline]
    pub fn is_empty(self) -> bool {
        self.min > self.max
    }

    #[inline]
    pub fn contains(self, t: Time) -> bool {
        self.min <= t && t <= self.max
    }
}

/// Earliest and latest times at which a vehicle may leave `from` to serve
/// request `r` while waiting at `w`.
///
/// Under [`Strategy::Rq`] `from` must be `w` and the vehicle has to be back
/// at `w` before its planned departure. Under [`Strategy::RqPlus`] `from`
/// is `w` or the customer of an earlier request of `w`; the vehicle has to
/// reach the next vertex of the route (or the depot) by its planned arrival,
/// both after serving `r` and, when `r` is rejected later, directly from
/// `from`.
pub fn feasibility_window(
    strategy: Strategy,
    instance: &Instance,
    schedule: &RouteSchedule,
    r: RequestId,
    w: Vertex,
    from: Vertex,
) -> Window {
    let req = instance.request(r);
    let c = req.customer;
    let visit = schedule.visit(w).expect("visited waiting vertex");
    let reach = instance.travel(from, c);
    let min = visit.arrival.max(req.reveal).max(req.tw_start - reach);
    let max = match strategy {
        Strategy::Rq => {
            debug_assert_eq!(from, w);
            (req.tw_end - reach).min(visit.departure - reach - req.service - instance.travel(c, w))
        }
        Strategy::RqPlus => {
            let (next, next_arrival) = schedule.successor(w);
            (req.tw_end - reach)
                .min(next_arrival - reach - req.service - instance.travel(c, next))
                .min(next_arrival - instance.travel(from, next))
        }
    };
    Window { min, max }
}

/// Request-to-waiting-vertex assignment for one first-stage solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    strategy: Strategy,
    vertex_of: Vec<Option<Vertex>>,
    /// Requests per vertex id (non-empty only for visited waiting vertices),
    /// in request order.
    per_vertex: Vec<Vec<RequestId>>,
    per_route: Vec<Vec<RequestId>>,
    unassigned: Vec<RequestId>,
    /// Window from the assigned waiting vertex.
    window: Vec<Window>,
}

/// Assigns every request, in request order, to the visited waiting vertex
/// with a non-empty window that has received the fewest requests so far,
/// ties broken by the lowest vertex id. Requests without such a vertex stay
/// unassigned.
///
/// With bounded capacity the candidates of a route are further limited to
/// vertices at or after the last position that already received a request
/// on that route. The requests of a route are then grouped by waiting
/// vertex in request order, which keeps the vehicle load seen by each
/// request a function of the requests of earlier waiting vertices only.
pub fn assign_requests(
    strategy: Strategy,
    solution: &FirstStageSolution,
    schedule: &RouteSchedule,
    instance: &Instance,
) -> Assignment {
    let nr = instance.requests().len();
    let mut vertex_of = vec![None; nr];
    let mut per_vertex = vec![Vec::new(); instance.vertex_count()];
    let mut per_route = vec![Vec::new(); solution.routes.len()];
    let mut unassigned = Vec::new();
    let mut window = vec![Window::EMPTY; nr];
    let mut frontier = vec![0usize; solution.routes.len()];
    let monotone = instance.capacity().is_bounded();

    let mut visited: Vec<Vertex> = solution.visited().collect();
    visited.sort_unstable();

    for &r in instance.order() {
        let mut best: Option<(usize, Vertex, Window)> = None;
        for &w in &visited {
            let (k, pos) = schedule.locate(w).expect("visited waiting vertex");
            if monotone && pos < frontier[k] {
                continue;
            }
            let win = feasibility_window(strategy, instance, schedule, r, w, w);
            if win.is_empty() {
                continue;
            }
            let load = per_vertex[w].len();
            if best.map_or(true, |(l, _, _)| load < l) {
                best = Some((load, w, win));
            }
        }
        match best {
            Some((_, w, win)) => {
                let (k, pos) = schedule.locate(w).expect("visited waiting vertex");
                frontier[k] = frontier[k].max(pos);
                vertex_of[r] = Some(w);
                per_vertex[w].push(r);
                per_route[k].push(r);
                window[r] = win;
            }
            None => unassigned.push(r),
        }
    }

    Assignment {
        strategy,
        vertex_of,
        per_vertex,
        per_route,
        unassigned,
        window,
    }
}

impl Assignment {
    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// Waiting vertex of `r`, `None` when unassigned.
    #[inline]
    pub fn vertex_of(&self, r: RequestId) -> Option<Vertex> {
        self.vertex_of[r]
    }

    /// Requests assigned to `w`, in request order.
    #[inline]
    pub fn requests_at(&self, w: Vertex) -> &[RequestId] {
        self.per_vertex.get(w).map_or(&[], Vec::as_slice)
    }

    /// Requests of route `k`, in request order.
    pub fn requests_on_route(&self, k: usize) -> &[RequestId] {
        &self.per_route[k]
    }

    pub fn route_count(&self) -> usize {
        self.per_route.len()
    }

    pub fn unassigned(&self) -> &[RequestId] {
        &self.unassigned
    }

    /// Window of `r` from its assigned waiting vertex.
    #[inline]
    pub fn window(&self, r: RequestId) -> Window {
        self.window[r]
    }

    pub fn request_count(&self) -> usize {
        self.vertex_of.len()
    }
}
