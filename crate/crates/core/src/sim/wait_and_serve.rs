use super::recourse::{Disposition, EventKind, RejectReason, SimOutcome, TraceEvent};
use super::{Scenario, SimError};
use crate::model::{Instance, Time, Vertex, DEPOT, DEPOT_DEPARTURE};

struct Vehicle {
    at: Vertex,
    /// End of the last service (or the depot departure).
    free: Time,
    load: usize,
    events: Vec<TraceEvent>,
}

/// Baseline without a first-stage plan: all vehicles start at the depot,
/// each revealed request goes to the closest vehicle that can still serve
/// it in its window and get back to the depot by the horizon, ties broken
/// by the least loaded and then the lowest index. A vehicle works through
/// its requests in acceptance order and idles where it last served.
pub fn simulate_wait_and_serve(instance: &Instance, scenario: &Scenario) -> Result<SimOutcome, SimError> {
    let nr = instance.requests().len();
    if scenario.mask().len() != nr {
        return Err(SimError::ScenarioSize {
            expected: nr,
            found: scenario.mask().len(),
        });
    }
    let capacity = instance.capacity();
    let h = instance.horizon();
    let mut fleet: Vec<Vehicle> = (0..instance.fleet())
        .map(|_| Vehicle {
            at: DEPOT,
            free: DEPOT_DEPARTURE,
            load: 0,
            events: Vec::new(),
        })
        .collect();
    let mut dispositions = vec![Disposition::NotRevealed; nr];
    let mut accepted = Vec::new();
    let mut revealed = 0;

    for &r in instance.order() {
        if !scenario.is_revealed(r) {
            continue;
        }
        revealed += 1;
        let req = instance.request(r);
        let c = req.customer;
        let mut best: Option<(Time, usize, usize, Time, Time)> = None;
        for (k, v) in fleet.iter().enumerate() {
            let leave = v.free.max(req.reveal);
            let arrive = leave + instance.travel(v.at, c);
            let start = arrive.max(req.tw_start);
            let fits = start <= req.tw_end
                && capacity.admits(v.load, req.demand)
                && start + req.service + instance.travel(c, DEPOT) <= h;
            if !fits {
                continue;
            }
            let key = (instance.travel(v.at, c), v.load, k);
            if best.map_or(true, |(d, l, i, _, _)| key < (d, l, i)) {
                best = Some((key.0, key.1, k, leave, start));
            }
        }
        let Some((_, _, k, leave, start)) = best else {
            dispositions[r] = Disposition::Rejected(RejectReason::NoVehicle);
            continue;
        };
        let v = &mut fleet[k];
        if leave > v.free {
            v.events.push(TraceEvent {
                kind: EventKind::Wait,
                start: v.free,
                end: leave,
                from: v.at,
                vertex: v.at,
                request: None,
            });
        }
        let arrive = leave + instance.travel(v.at, c);
        v.events.push(TraceEvent {
            kind: EventKind::Travel,
            start: leave,
            end: arrive,
            from: v.at,
            vertex: c,
            request: None,
        });
        if start > arrive {
            v.events.push(TraceEvent {
                kind: EventKind::Wait,
                start: arrive,
                end: start,
                from: c,
                vertex: c,
                request: None,
            });
        }
        v.events.push(TraceEvent {
            kind: EventKind::Serve,
            start,
            end: start + req.service,
            from: c,
            vertex: c,
            request: Some(r),
        });
        dispositions[r] = Disposition::Accepted {
            vehicle: k,
            from: v.at,
            departure: leave,
        };
        v.at = c;
        v.free = start + req.service;
        v.load += capacity.charge(req.demand);
        accepted.push(r);
    }

    let trace = fleet
        .into_iter()
        .map(|mut v| {
            if v.at != DEPOT {
                let depart = h - instance.travel(v.at, DEPOT);
                if depart > v.free {
                    v.events.push(TraceEvent {
                        kind: EventKind::Wait,
                        start: v.free,
                        end: depart,
                        from: v.at,
                        vertex: v.at,
                        request: None,
                    });
                }
                v.events.push(TraceEvent {
                    kind: EventKind::Travel,
                    start: depart,
                    end: h,
                    from: v.at,
                    vertex: DEPOT,
                    request: None,
                });
            }
            v.events
        })
        .collect();

    Ok(SimOutcome {
        rejected_count: revealed - accepted.len(),
        accepted,
        revealed,
        dispositions,
        trace,
    })
}
