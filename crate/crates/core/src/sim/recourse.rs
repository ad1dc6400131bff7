use std::io::{self, Write};

use thiserror::Error;

use super::Scenario;
use crate::model::{feasibility_window, Plan, RequestId, Strategy, Time, Vertex, DEPOT, DEPOT_DEPARTURE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RejectReason {
    /// No waiting vertex was assigned to the request.
    Unassigned,
    /// The vehicle could not leave in time.
    Late,
    /// The vehicle was too full.
    Capacity,
    /// Wait-and-serve only: no vehicle could make it.
    NoVehicle,
}

impl RejectReason {
    pub fn name(self) -> &'static str {
        match self {
            RejectReason::Unassigned => "unassigned",
            RejectReason::Late => "late",
            RejectReason::Capacity => "capacity",
            RejectReason::NoVehicle => "no-vehicle",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Disposition {
    NotRevealed,
    /// Accepted at reveal time; the vehicle leaves `from` at `departure`.
    Accepted {
        vehicle: usize,
        from: Vertex,
        departure: Time,
    },
    Rejected(RejectReason),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventKind {
    Travel,
    Wait,
    Serve,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::Travel => "travel",
            EventKind::Wait => "wait",
            EventKind::Serve => "serve",
        }
    }
}

/// One timed vehicle activity. For travel `from` is the origin and
/// `vertex` the destination; otherwise both are the location.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TraceEvent {
    pub kind: EventKind,
    pub start: Time,
    pub end: Time,
    pub from: Vertex,
    pub vertex: Vertex,
    pub request: Option<RequestId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimOutcome {
    /// Accepted requests in acceptance order.
    pub accepted: Vec<RequestId>,
    pub revealed: usize,
    pub rejected_count: usize,
    /// Indexed by request id.
    pub dispositions: Vec<Disposition>,
    /// Per vehicle, in time order.
    pub trace: Vec<Vec<TraceEvent>>,
}

impl SimOutcome {
    pub fn is_accepted(&self, r: RequestId) -> bool {
        matches!(self.dispositions[r], Disposition::Accepted { .. })
    }

    /// Writes the trace as `vehicle,event,t_start,t_end,vertex,request`.
    pub fn write_trace_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "vehicle,event,t_start,t_end,vertex,request")?;
        for (k, events) in self.trace.iter().enumerate() {
            for e in events {
                let request = e.request.map(|r| r.to_string()).unwrap_or_default();
                writeln!(
                    out,
                    "{k},{},{},{},{},{request}",
                    e.kind.name(),
                    e.start,
                    e.end,
                    e.vertex
                )?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("scenario covers {found} requests, instance has {expected}")]
    ScenarioSize { expected: usize, found: usize },
}

/// Timeline of one vehicle while it is attached to one waiting vertex.
struct Post {
    /// Vertex the vehicle is considered to be at for the next decision.
    loc: Vertex,
    /// Time from which that vertex is available for the next decision.
    t: Time,
    /// Physical position and time.
    ploc: Vertex,
    ptime: Time,
    events: Vec<TraceEvent>,
}

impl Post {
    fn new(w: Vertex, arrival: Time) -> Self {
        Self {
            loc: w,
            t: arrival,
            ploc: w,
            ptime: arrival,
            events: Vec::new(),
        }
    }

    fn wait_until(&mut self, t: Time) {
        if t > self.ptime {
            self.events.push(TraceEvent {
                kind: EventKind::Wait,
                start: self.ptime,
                end: t,
                from: self.ploc,
                vertex: self.ploc,
                request: None,
            });
            self.ptime = t;
        }
    }

    fn travel(&mut self, to: Vertex, depart: Time, duration: Time) {
        self.wait_until(depart);
        self.events.push(TraceEvent {
            kind: EventKind::Travel,
            start: depart,
            end: depart + duration,
            from: self.ploc,
            vertex: to,
            request: None,
        });
        self.ploc = to;
        self.ptime = depart + duration;
    }

    fn serve(&mut self, r: RequestId, duration: Time) {
        self.events.push(TraceEvent {
            kind: EventKind::Serve,
            start: self.ptime,
            end: self.ptime + duration,
            from: self.ploc,
            vertex: self.ploc,
            request: Some(r),
        });
        self.ptime += duration;
    }
}

/// Replays one scenario under the plan's recourse strategy.
///
/// Requests are considered at their reveal time in request order (this is
/// the same as advancing a clock over the horizon). A revealed request is
/// accepted iff the vehicle of its waiting vertex can leave in time and has
/// room; requests that do not show up still move the vehicle's
/// availability to their reveal time.
pub fn simulate(plan: &Plan<'_>, scenario: &Scenario) -> Result<SimOutcome, SimError> {
    let instance = plan.instance;
    let nr = instance.requests().len();
    if scenario.mask().len() != nr {
        return Err(SimError::ScenarioSize {
            expected: nr,
            found: scenario.mask().len(),
        });
    }
    let schedule = &plan.schedule;
    let assignment = &plan.assignment;
    let strategy = plan.strategy();
    let capacity = instance.capacity();

    let mut posts: Vec<Option<Post>> = (0..instance.vertex_count()).map(|_| None).collect();
    let mut cursor = vec![0usize; instance.vertex_count()];
    let mut loads = vec![0usize; plan.solution.routes.len()];
    let mut dispositions = vec![Disposition::NotRevealed; nr];
    let mut accepted = Vec::new();
    let mut revealed = 0;

    for &r in instance.order() {
        let req = instance.request(r);
        let shows = scenario.is_revealed(r);
        revealed += usize::from(shows);
        let Some(w) = assignment.vertex_of(r) else {
            if shows {
                dispositions[r] = Disposition::Rejected(RejectReason::Unassigned);
            }
            continue;
        };
        let (k, _) = schedule.locate(w).expect("assigned to a visited vertex");
        let visit = *schedule.visit(w).expect("assigned to a visited vertex");
        let post = posts[w].get_or_insert_with(|| Post::new(w, visit.arrival));
        let siblings = assignment.requests_at(w);
        cursor[w] += 1;
        let next_reveal = siblings.get(cursor[w]).map(|&n| instance.request(n).reveal);
        // Whether a vehicle idle at a customer at time `x` stays there.
        let stays = |x: Time| next_reveal.map_or(true, |g| g <= x);
        let c = req.customer;

        let from = post.loc;
        let window = match strategy {
            Strategy::Rq => assignment.window(r),
            Strategy::RqPlus => feasibility_window(strategy, instance, schedule, r, w, from),
        };
        let mut idle_until = post.t.max(req.reveal);
        if shows {
            let departure = post.t.max(window.min);
            if departure > window.max {
                dispositions[r] = Disposition::Rejected(RejectReason::Late);
                idle_until = departure;
            } else if !capacity.admits(loads[k], req.demand) {
                dispositions[r] = Disposition::Rejected(RejectReason::Capacity);
                idle_until = departure;
            } else {
                dispositions[r] = Disposition::Accepted {
                    vehicle: k,
                    from,
                    departure,
                };
                accepted.push(r);
                loads[k] += capacity.charge(req.demand);
                debug_assert_eq!(post.ploc, from);
                post.travel(c, departure, instance.travel(from, c));
                post.serve(r, req.service);
                let done = post.ptime;
                match strategy {
                    Strategy::Rq => {
                        post.travel(w, done, instance.travel(c, w));
                        post.loc = w;
                        post.t = post.ptime;
                    }
                    Strategy::RqPlus if stays(done) => {
                        post.loc = c;
                        post.t = done;
                    }
                    Strategy::RqPlus => {
                        let back = done + instance.travel(c, w);
                        if back <= visit.departure {
                            post.travel(w, done, instance.travel(c, w));
                        }
                        post.loc = w;
                        post.t = back;
                    }
                }
                continue;
            }
        }
        // Nothing was served: the vehicle becomes free at `idle_until`.
        if post.loc == w || stays(idle_until) {
            post.t = idle_until;
        } else {
            let here = post.loc;
            let back = idle_until + instance.travel(here, w);
            if back <= visit.departure {
                post.travel(w, idle_until, instance.travel(here, w));
            }
            post.loc = w;
            post.t = back;
        }
    }

    let mut trace = Vec::with_capacity(plan.solution.routes.len());
    for (k, route) in plan.solution.routes.iter().enumerate() {
        let mut events = Vec::new();
        let mut ploc = DEPOT;
        let mut ptime = DEPOT_DEPARTURE;
        let times = schedule.route(k);
        let stops = route
            .iter()
            .map(|&w| (w, schedule.arrival(w)))
            .chain((!route.is_empty()).then_some((DEPOT, times.return_time)));
        for (next, arrival) in stops {
            let depart = arrival - instance.travel(ploc, next);
            debug_assert!(depart >= ptime, "vehicle {k} cannot leave {ploc} at {depart}");
            if depart > ptime {
                events.push(TraceEvent {
                    kind: EventKind::Wait,
                    start: ptime,
                    end: depart,
                    from: ploc,
                    vertex: ploc,
                    request: None,
                });
            }
            events.push(TraceEvent {
                kind: EventKind::Travel,
                start: depart,
                end: arrival,
                from: ploc,
                vertex: next,
                request: None,
            });
            ploc = next;
            ptime = arrival;
            if next != DEPOT {
                if let Some(post) = posts[next].take() {
                    events.extend(post.events);
                    ploc = post.ploc;
                    ptime = post.ptime;
                }
            }
        }
        trace.push(events);
    }

    Ok(SimOutcome {
        rejected_count: revealed - accepted.len(),
        accepted,
        revealed,
        dispositions,
        trace,
    })
}
