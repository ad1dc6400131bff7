use std::time::{Duration, Instant};

use super::Problem;
use crate::expectation::{Evaluator, ExpectedCost, MemoryMode};
use crate::model::{FirstStageSolution, Instance, Strategy, Time, Vertex, DEPOT, DEPOT_DEPARTURE};

#[derive(Clone, Debug)]
pub struct ExactParams {
    pub strategy: Strategy,
    pub time_limit: Option<Duration>,
    /// Enumerate only solutions that use every vehicle and give the last
    /// vertex of each route the largest domain value that fits the horizon.
    pub restricted: bool,
}

impl Default for ExactParams {
    fn default() -> Self {
        Self {
            strategy: Strategy::Rq,
            time_limit: None,
            restricted: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExactResult {
    pub solution: Option<FirstStageSolution>,
    pub cost: Option<ExpectedCost<f64>>,
    /// The whole candidate space was visited.
    pub proven: bool,
    pub candidates: u64,
    /// Candidates within the horizon, i.e. evaluated.
    pub evaluated: u64,
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn factorial(n: u64) -> u128 {
    (1..=n as u128).product()
}

/// Ways to split `s` labelled vertices into `k` non-empty ordered lists,
/// the lists themselves unordered.
fn lah(s: u64, k: u64) -> u128 {
    match (s, k) {
        (0, 0) => 1,
        (_, 0) => 0,
        _ if k > s => 0,
        _ => binomial(s - 1, k - 1) * factorial(s) / factorial(k),
    }
}

/// Size of the restricted space: `Σ_s C(m,s)·L(s,K)·|D|^(s−K)`.
pub fn restricted_candidate_count(m: usize, fleet: usize, domain_len: usize) -> u128 {
    let k = fleet.min(m) as u64;
    (k..=m as u64)
        .map(|s| binomial(m as u64, s) * lah(s, k) * (domain_len as u128).pow((s - k) as u32))
        .sum()
}

/// Size of the unrestricted space (idle vehicles and every waiting time
/// allowed).
pub fn unrestricted_candidate_count(m: usize, fleet: usize, domain_len: usize) -> u128 {
    (0..=m as u64)
        .map(|s| {
            let lists: u128 = (0..=fleet.min(s as usize) as u64).map(|j| lah(s, j)).sum();
            binomial(m as u64, s) * lists * (domain_len as u128).pow(s as u32)
        })
        .sum()
}

struct Search<'a> {
    problem: &'a Problem,
    evaluator: Evaluator<'a, f64>,
    params: &'a ExactParams,
    deadline: Option<Instant>,
    best: Option<(FirstStageSolution, ExpectedCost<f64>)>,
    candidates: u64,
    evaluated: u64,
    stopped: bool,
}

impl Search<'_> {
    fn out_of_time(&mut self) -> bool {
        if !self.stopped {
            if let Some(d) = self.deadline {
                self.stopped = Instant::now() >= d;
            }
        }
        self.stopped
    }

    fn visit(&mut self, solution: &FirstStageSolution) {
        self.candidates += 1;
        if !fits(&self.problem.instance, solution) {
            return;
        }
        self.evaluated += 1;
        let cost = self
            .evaluator
            .update(solution)
            .expect("enumerated solutions are well formed");
        if self.best.as_ref().is_none_or(|(_, b)| cost.total < b.total) {
            self.best = Some((solution.clone(), cost));
        }
    }

    /// Every split of `order` into `lists` non-empty routes whose first
    /// vertices increase.
    fn routes(&mut self, order: &[Vertex], lists: usize) {
        let mut cuts = Vec::with_capacity(lists + 1);
        self.cuts(order, lists, 0, &mut cuts);
    }

    fn cuts(&mut self, order: &[Vertex], lists: usize, from: usize, cuts: &mut Vec<usize>) {
        if self.out_of_time() {
            return;
        }
        if cuts.len() + 1 == lists {
            let mut bounds = vec![0];
            bounds.extend(cuts.iter().copied());
            bounds.push(order.len());
            let routes: Vec<Vec<Vertex>> = bounds.windows(2).map(|b| order[b[0]..b[1]].to_vec()).collect();
            if routes.windows(2).all(|r| r[0][0] < r[1][0]) {
                self.waits(routes);
            }
            return;
        }
        let remaining = lists - cuts.len() - 1;
        for c in from + 1..=order.len() - remaining {
            cuts.push(c);
            self.cuts(order, lists, c, cuts);
            cuts.pop();
        }
    }

    fn waits(&mut self, mut routes: Vec<Vec<Vertex>>) {
        let instance = &self.problem.instance;
        routes.resize(instance.fleet(), Vec::new());
        let mut solution = FirstStageSolution {
            routes,
            wait: Default::default(),
        };
        let free: Vec<Vertex> = if self.params.restricted {
            solution
                .routes
                .iter()
                .filter_map(|r| r.split_last().map(|(_, head)| head))
                .flatten()
                .copied()
                .collect()
        } else {
            solution.visited().collect()
        };
        self.assign(&mut solution, &free, 0);
    }

    fn assign(&mut self, solution: &mut FirstStageSolution, free: &[Vertex], i: usize) {
        if self.out_of_time() {
            return;
        }
        if i == free.len() {
            if self.params.restricted {
                fill_last(self.problem, solution);
            }
            self.visit(solution);
            return;
        }
        for &tau in self.problem.domain.values() {
            solution.wait.insert(free[i], tau);
            self.assign(solution, free, i + 1);
            if self.stopped {
                return;
            }
        }
    }
}

/// Gives the last vertex of each route the largest domain value keeping
/// the route within the horizon, or the smallest value when none does.
fn fill_last(problem: &Problem, solution: &mut FirstStageSolution) {
    let instance = &problem.instance;
    for route in &solution.routes {
        let Some((&last, head)) = route.split_last() else {
            continue;
        };
        let travel = route_travel(instance, route);
        let used: Time = head.iter().map(|w| solution.wait[w]).sum();
        let slack = instance.horizon() - DEPOT_DEPARTURE - travel - used;
        let tau = problem.domain.max_at_most(slack).unwrap_or(problem.domain.min());
        solution.wait.insert(last, tau);
    }
}

fn route_travel(instance: &Instance, route: &[Vertex]) -> Time {
    let mut prev = DEPOT;
    let mut total = 0;
    for &w in route {
        total += instance.travel(prev, w);
        prev = w;
    }
    total + instance.travel(prev, DEPOT)
}

fn fits(instance: &Instance, solution: &FirstStageSolution) -> bool {
    solution.routes.iter().all(|route| {
        route.is_empty()
            || DEPOT_DEPARTURE + route_travel(instance, route) + route.iter().map(|w| solution.wait[w]).sum::<Time>()
                <= instance.horizon()
    })
}

fn permutations(items: &mut Vec<Vertex>, k: usize, out: &mut Vec<Vec<Vertex>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Minimum expected cost over the enumerated first-stage solutions of
/// `problem`, with waiting times from its domain. Routes are ordered
/// subsets of the waiting vertices; vehicles are interchangeable, so each
/// set of routes is visited once. Solutions beyond the horizon are counted
/// but not evaluated. When the time limit interrupts the enumeration the
/// best solution so far is returned with `proven = false`.
pub fn exact_enumerate(problem: &Problem, params: &ExactParams) -> ExactResult {
    let instance = &problem.instance;
    let mut search = Search {
        problem,
        evaluator: Evaluator::new(instance, params.strategy, MemoryMode::Full),
        params,
        deadline: params.time_limit.map(|t| Instant::now() + t),
        best: None,
        candidates: 0,
        evaluated: 0,
        stopped: false,
    };
    let m = instance.waiting_count();
    let fleet = instance.fleet();
    let vertices: Vec<Vertex> = instance.waiting_vertices().collect();
    if !params.restricted {
        search.visit(&FirstStageSolution::empty(fleet));
    }
    let smallest = if params.restricted { fleet.min(m).max(1) } else { 1 };
    for mask in 1u32..(1 << m) {
        if mask.count_ones() < smallest as u32 {
            continue;
        }
        let mut subset: Vec<Vertex> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| vertices[i]).collect();
        let mut orders = Vec::new();
        permutations(&mut subset, 0, &mut orders);
        let list_counts: Vec<usize> = if params.restricted {
            vec![fleet.min(m)]
        } else {
            (1..=fleet.min(subset.len())).collect()
        };
        for order in &orders {
            for &lists in &list_counts {
                search.routes(order, lists);
            }
        }
        if search.out_of_time() {
            break;
        }
    }
    let proven = !search.stopped;
    let (solution, cost) = match search.best {
        Some((s, mut c)) => {
            c.scale = problem.scale;
            (Some(s), Some(c))
        }
        None => (None, None),
    };
    ExactResult {
        solution,
        cost,
        proven,
        candidates: search.candidates,
        evaluated: search.evaluated,
    }
}
