//! Per-waiting-vertex recursions shared by the one-shot engines and the
//! incremental evaluator.
//!
//! For every request `r` of a waiting vertex the engines keep the
//! distribution of the vehicle's availability when `r` is considered
//! (location, time, load). One step splits it into the mass where `r`
//! appears (it then waits for the window to open, is served if the window
//! and the capacity allow it, and otherwise the vehicle stays idle) and the
//! mass where `r` does not appear (the vehicle idles until the reveal time),
//! producing the availability distribution for the next request.

use std::sync::Arc;

use super::layer::{row_is_zero, Layer};
use crate::model::{
    feasibility_window, Capacity, Instance, PotentialRequest, RequestId, RouteSchedule, Strategy, Time, Vertex, Window,
};
use crate::scalar::{CompensatedSum, Probability};

/// Everything a waiting vertex's recursion depends on besides its requests
/// and incoming load.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Stop {
    pub w: Vertex,
    pub arrival: Time,
    pub departure: Time,
    pub next: Vertex,
    pub next_arrival: Time,
}

impl Stop {
    pub fn of(schedule: &RouteSchedule, w: Vertex) -> Self {
        let visit = schedule.visit(w).expect("visited waiting vertex");
        let (next, next_arrival) = schedule.successor(w);
        Self {
            w,
            arrival: visit.arrival,
            departure: visit.departure,
            next,
            next_arrival,
        }
    }
}

pub(crate) struct Ctx<'a> {
    pub instance: &'a Instance,
    pub schedule: &'a RouteSchedule,
    pub strategy: Strategy,
    pub capacity: Capacity,
    /// Times are capped here. Every request is late from this time on and
    /// every later decision is the same as at the cap.
    pub late: Time,
}

impl<'a> Ctx<'a> {
    pub fn new(instance: &'a Instance, schedule: &'a RouteSchedule, strategy: Strategy) -> Self {
        let latest_deadline = instance.requests().iter().map(|r| r.tw_end).max().unwrap_or(0);
        Self {
            instance,
            schedule,
            strategy,
            capacity: instance.capacity(),
            late: instance.horizon().max(latest_deadline) + 1,
        }
    }

    pub fn load_levels(&self) -> usize {
        self.capacity.load_levels()
    }

    #[inline]
    fn cap(&self, t: Time) -> Time {
        t.min(self.late)
    }

    /// Availability distribution when the vehicle reaches the stop.
    pub fn arrival_layer<T: Probability>(&self, stop: &Stop, loads: &[T]) -> Arc<Layer<T>> {
        Arc::new(Layer::point(self.cap(stop.arrival), loads))
    }

    pub fn step_key(&self, stop: &Stop, r: RequestId) -> StepKey {
        match self.strategy {
            Strategy::Rq => StepKey::Rq {
                request: r,
                window: feasibility_window(Strategy::Rq, self.instance, self.schedule, r, stop.w, stop.w),
            },
            Strategy::RqPlus => StepKey::RqPlus {
                request: r,
                arrival: stop.arrival,
                next: stop.next,
                next_arrival: stop.next_arrival,
            },
        }
    }

    /// Processes request `requests[i]` of the stop and returns the next
    /// availability distribution together with the acceptance probability.
    pub fn step<T: Probability>(&self, stop: &Stop, requests: &[RequestId], i: usize, f: &Layer<T>) -> (Layer<T>, T) {
        match self.strategy {
            Strategy::Rq => self.step_rq(stop, requests[i], f),
            Strategy::RqPlus => self.step_rqplus(stop, requests, i, f),
        }
    }

    fn step_rq<T: Probability>(&self, stop: &Stop, r: RequestId, f: &Layer<T>) -> (Layer<T>, T) {
        let req = self.instance.request(r);
        let win = feasibility_window(Strategy::Rq, self.instance, self.schedule, r, stop.w, stop.w);
        let round_trip =
            self.instance.travel(stop.w, req.customer) + req.service + self.instance.travel(req.customer, stop.w);

        let mut span = Span::default();
        for t in f.times() {
            if row_is_zero(f.row(0, t)) {
                continue;
            }
            span.add(self.cap(t.max(req.reveal)));
            let dep = self.cap(t.max(win.min));
            span.add(dep);
            if dep <= win.max {
                span.add(self.cap(dep + round_trip));
            }
        }

        let (p, np) = probabilities::<T>(req);
        let charge = self.capacity.charge(req.demand);
        let admissible = f.nq.saturating_sub(charge);
        let mut out = span.layer(1, f.nq);
        let mut accepted = CompensatedSum::new();
        for t in f.times() {
            let row = f.row(0, t);
            if row_is_zero(row) {
                continue;
            }
            add_scaled(out.row_mut(0, self.cap(t.max(req.reveal))), row, &np);
            let dep = self.cap(t.max(win.min));
            if dep <= win.max {
                let done = self.cap(dep + round_trip);
                for (q, x) in row.iter().enumerate().take(admissible) {
                    if !x.is_zero() {
                        let m = p.clone() * x.clone();
                        accepted.add(m.clone());
                        out.row_mut(0, done)[q + charge] += m;
                    }
                }
                add_scaled(&mut out.row_mut(0, dep)[admissible..], &row[admissible..], &p);
            } else {
                add_scaled(out.row_mut(0, dep), row, &p);
            }
        }
        (out, accepted.value())
    }

    fn step_rqplus<T: Probability>(
        &self,
        stop: &Stop,
        requests: &[RequestId],
        i: usize,
        f: &Layer<T>,
    ) -> (Layer<T>, T) {
        let inst = self.instance;
        let r = requests[i];
        let req = inst.request(r);
        let c = req.customer;
        let w = stop.w;
        let next_reveal = requests.get(i + 1).map(|&n| inst.request(n).reveal);
        let stays = |x: Time| next_reveal.map_or(true, |g| g <= x);
        let new_loc = f.locs;

        let sources: Vec<Source> = (0..f.locs)
            .map(|li| {
                let v = if li == 0 {
                    w
                } else {
                    inst.request(requests[li - 1]).customer
                };
                Source {
                    window: feasibility_window(Strategy::RqPlus, inst, self.schedule, r, w, v),
                    to_customer: inst.travel(v, c),
                    back: inst.travel(v, w),
                }
            })
            .collect();
        let customer_back = inst.travel(c, w);

        // Where the vehicle is free after being idle at `li` until `t`.
        let settle = |li: usize, t: Time| -> (usize, Time) {
            if li == 0 || stays(t) {
                (li, t)
            } else {
                (0, self.cap(t + sources[li].back))
            }
        };
        // Where the vehicle is free after serving `r` with departure `dep`.
        let served = |li: usize, dep: Time| -> (usize, Time) {
            let done = self.cap(dep + sources[li].to_customer + req.service);
            if stays(done) {
                (new_loc, done)
            } else {
                (0, self.cap(done + customer_back))
            }
        };

        let mut span = Span::default();
        for li in 0..f.locs {
            let src = &sources[li];
            for t in f.times() {
                if row_is_zero(f.row(li, t)) {
                    continue;
                }
                span.add(settle(li, self.cap(t.max(req.reveal))).1);
                let dep = self.cap(t.max(src.window.min));
                span.add(settle(li, dep).1);
                if dep <= src.window.max {
                    span.add(served(li, dep).1);
                }
            }
        }

        let (p, np) = probabilities::<T>(req);
        let charge = self.capacity.charge(req.demand);
        let admissible = f.nq.saturating_sub(charge);
        let mut out = span.layer(f.locs + 1, f.nq);
        let mut accepted = CompensatedSum::new();
        for li in 0..f.locs {
            let src = &sources[li];
            for t in f.times() {
                let row = f.row(li, t);
                if row_is_zero(row) {
                    continue;
                }
                let (l_abs, t_abs) = settle(li, self.cap(t.max(req.reveal)));
                add_scaled(out.row_mut(l_abs, t_abs), row, &np);
                let dep = self.cap(t.max(src.window.min));
                let (l_rej, t_rej) = settle(li, dep);
                if dep <= src.window.max {
                    let (l_acc, t_acc) = served(li, dep);
                    for (q, x) in row.iter().enumerate().take(admissible) {
                        if !x.is_zero() {
                            let m = p.clone() * x.clone();
                            accepted.add(m.clone());
                            out.row_mut(l_acc, t_acc)[q + charge] += m;
                        }
                    }
                    add_scaled(&mut out.row_mut(l_rej, t_rej)[admissible..], &row[admissible..], &p);
                } else {
                    add_scaled(out.row_mut(l_rej, t_rej), row, &p);
                }
            }
        }
        (out, accepted.value())
    }

    /// Runs the recursion of one stop from request `start` on. `layers`
    /// must hold the availability distributions of requests `0..=start`
    /// and `accept` the acceptance probabilities of `0..start`; both are
    /// completed (the last layer is the distribution after the final
    /// request). With `keep == false` only the final layer is retained.
    pub fn run<T: Probability>(
        &self,
        stop: &Stop,
        requests: &[RequestId],
        start: usize,
        layers: &mut Vec<Arc<Layer<T>>>,
        accept: &mut Vec<T>,
        keep: bool,
    ) {
        if keep {
            layers.truncate(start + 1);
        }
        accept.truncate(start);
        for i in start..requests.len() {
            let (next, pr) = self.step(stop, requests, i, layers.last().expect("incoming layer"));
            accept.push(pr);
            if keep {
                layers.push(Arc::new(next));
            } else {
                *layers.last_mut().expect("incoming layer") = Arc::new(next);
            }
        }
    }
}

/// Everything one step reads besides the incoming layer, the request and
/// its waiting vertex. Steps with equal keys and equal incoming layers
/// produce equal outputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum StepKey {
    Rq {
        request: RequestId,
        window: Window,
    },
    RqPlus {
        request: RequestId,
        arrival: Time,
        next: Vertex,
        next_arrival: Time,
    },
}

struct Source {
    window: Window,
    to_customer: Time,
    back: Time,
}

#[derive(Default)]
struct Span {
    lo: Option<Time>,
    hi: Time,
}

impl Span {
    #[inline]
    fn add(&mut self, t: Time) {
        match self.lo {
            None => {
                self.lo = Some(t);
                self.hi = t;
            }
            Some(lo) => {
                self.lo = Some(lo.min(t));
                self.hi = self.hi.max(t);
            }
        }
    }

    fn layer<T: Probability>(&self, locs: usize, nq: usize) -> Layer<T> {
        match self.lo {
            Some(lo) => Layer::zeros(locs, lo, (self.hi - lo + 1) as usize, nq),
            None => Layer::zeros(locs, 1, 0, nq),
        }
    }
}

fn probabilities<T: Probability>(req: &PotentialRequest) -> (T, T) {
    let p = T::from_f64(req.probability);
    let np = T::one() - p.clone();
    (p, np)
}

/// `dst[q] += factor * src[q]` over the non-zero entries of `src`.
#[inline]
fn add_scaled<T: Probability>(dst: &mut [T], src: &[T], factor: &T) {
    if factor.is_zero() {
        return;
    }
    for (q, x) in src.iter().enumerate() {
        if !x.is_zero() {
            dst[q] += factor.clone() * x.clone();
        }
    }
}
