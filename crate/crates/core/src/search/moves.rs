//! Neighborhood of the local search.

use rand::Rng;

use super::WaitDomain;
use crate::model::{FirstStageSolution, Instance, Time, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MoveKind {
    Relocate,
    Swap,
    InvertedTwoOpt,
    CrossExchange,
    Insert,
    Delete,
    IncreaseWait,
    DecreaseWait,
    TransferWait,
}

impl MoveKind {
    pub const ALL: [MoveKind; 9] = [
        MoveKind::Relocate,
        MoveKind::Swap,
        MoveKind::InvertedTwoOpt,
        MoveKind::CrossExchange,
        MoveKind::Insert,
        MoveKind::Delete,
        MoveKind::IncreaseWait,
        MoveKind::DecreaseWait,
        MoveKind::TransferWait,
    ];
}

/// Route index and position.
pub type Slot = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    /// Remove the vertex at `from` and insert it at `to` (position taken
    /// after the removal).
    Relocate {
        from: Slot,
        to: Slot,
    },
    Swap {
        a: Slot,
        b: Slot,
    },
    /// Reverse positions `i..=j` of a route.
    InvertedTwoOpt {
        route: usize,
        i: usize,
        j: usize,
    },
    /// Exchange segment `start..start + len` of one route with one of
    /// another route.
    CrossExchange {
        a: (usize, usize, usize),
        b: (usize, usize, usize),
    },
    Insert {
        vertex: Vertex,
        at: Slot,
        wait: Time,
    },
    Delete {
        at: Slot,
    },
    IncreaseWait {
        vertex: Vertex,
    },
    DecreaseWait {
        vertex: Vertex,
    },
    /// Move `steps` domain units of waiting time from one vertex to another.
    TransferWait {
        from: Vertex,
        to: Vertex,
        steps: usize,
    },
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        match self {
            Move::Relocate { .. } => MoveKind::Relocate,
            Move::Swap { .. } => MoveKind::Swap,
            Move::InvertedTwoOpt { .. } => MoveKind::InvertedTwoOpt,
            Move::CrossExchange { .. } => MoveKind::CrossExchange,
            Move::Insert { .. } => MoveKind::Insert,
            Move::Delete { .. } => MoveKind::Delete,
            Move::IncreaseWait { .. } => MoveKind::IncreaseWait,
            Move::DecreaseWait { .. } => MoveKind::DecreaseWait,
            Move::TransferWait { .. } => MoveKind::TransferWait,
        }
    }
}

/// State needed to revert a move.
#[derive(Clone, Debug)]
pub struct Undo {
    routes: Vec<(usize, Vec<Vertex>)>,
    waits: Vec<(Vertex, Option<Time>)>,
}

fn visited_slots(sol: &FirstStageSolution) -> Vec<Slot> {
    sol.routes
        .iter()
        .enumerate()
        .flat_map(|(k, r)| (0..r.len()).map(move |i| (k, i)))
        .collect()
}

fn pick<R: Rng, T: Copy>(rng: &mut R, items: &[T]) -> Option<T> {
    (!items.is_empty()).then(|| items[rng.random_range(0..items.len())])
}

/// Draws operands for a move of `kind`, or `None` when the kind does not
/// apply to this solution.
pub fn sample_move<R: Rng>(
    kind: MoveKind,
    sol: &FirstStageSolution,
    instance: &Instance,
    domain: &WaitDomain,
    rng: &mut R,
) -> Option<Move> {
    let slots = visited_slots(sol);
    let fleet = sol.routes.len();
    match kind {
        MoveKind::Relocate => {
            let from = pick(rng, &slots)?;
            let to_route = rng.random_range(0..fleet);
            let len = sol.routes[to_route].len() - usize::from(to_route == from.0);
            let to = (to_route, rng.random_range(0..=len));
            (to != from).then_some(Move::Relocate { from, to })
        }
        MoveKind::Swap => {
            if slots.len() < 2 {
                return None;
            }
            let i = rng.random_range(0..slots.len());
            let mut j = rng.random_range(0..slots.len() - 1);
            if j >= i {
                j += 1;
            }
            Some(Move::Swap {
                a: slots[i],
                b: slots[j],
            })
        }
        MoveKind::InvertedTwoOpt => {
            let routes: Vec<usize> = (0..fleet).filter(|&k| sol.routes[k].len() >= 2).collect();
            let route = pick(rng, &routes)?;
            let len = sol.routes[route].len();
            let i = rng.random_range(0..len - 1);
            let j = rng.random_range(i + 1..len);
            Some(Move::InvertedTwoOpt { route, i, j })
        }
        MoveKind::CrossExchange => {
            let routes: Vec<usize> = (0..fleet).filter(|&k| !sol.routes[k].is_empty()).collect();
            if routes.len() < 2 {
                return None;
            }
            let x = rng.random_range(0..routes.len());
            let mut y = rng.random_range(0..routes.len() - 1);
            if y >= x {
                y += 1;
            }
            let segment = |rng: &mut R, k: usize| {
                let len = sol.routes[k].len();
                let start = rng.random_range(0..len);
                (k, start, rng.random_range(1..=len - start))
            };
            let a = segment(rng, routes[x]);
            let b = segment(rng, routes[y]);
            Some(Move::CrossExchange { a, b })
        }
        MoveKind::Insert => {
            let unvisited: Vec<Vertex> = instance
                .waiting_vertices()
                .filter(|&w| sol.locate(w).is_none())
                .collect();
            let vertex = pick(rng, &unvisited)?;
            let k = rng.random_range(0..fleet);
            let at = (k, rng.random_range(0..=sol.routes[k].len()));
            Some(Move::Insert {
                vertex,
                at,
                wait: domain.random(rng),
            })
        }
        MoveKind::Delete => pick(rng, &slots).map(|at| Move::Delete { at }),
        MoveKind::IncreaseWait => {
            let candidates: Vec<Vertex> = sol
                .visited()
                .filter(|&w| domain.count_above(wait(sol, w)) > 0)
                .collect();
            pick(rng, &candidates).map(|vertex| Move::IncreaseWait { vertex })
        }
        MoveKind::DecreaseWait => {
            let candidates: Vec<Vertex> = sol
                .visited()
                .filter(|&w| domain.count_below(wait(sol, w)) > 0)
                .collect();
            pick(rng, &candidates).map(|vertex| Move::DecreaseWait { vertex })
        }
        MoveKind::TransferWait => {
            let givers: Vec<Vertex> = sol
                .visited()
                .filter(|&w| domain.count_below(wait(sol, w)) > 0)
                .collect();
            let from = pick(rng, &givers)?;
            let takers: Vec<Vertex> = sol
                .visited()
                .filter(|&w| w != from && domain.count_above(wait(sol, w)) > 0)
                .collect();
            let to = pick(rng, &takers)?;
            let most = domain
                .count_below(wait(sol, from))
                .min(domain.count_above(wait(sol, to)));
            Some(Move::TransferWait {
                from,
                to,
                steps: rng.random_range(1..=most),
            })
        }
    }
}

fn wait(sol: &FirstStageSolution, w: Vertex) -> Time {
    sol.wait_of(w).expect("visited vertex has a waiting time")
}

/// Applies a move sampled for `sol` and returns how to revert it.
pub fn apply_move(sol: &mut FirstStageSolution, mv: &Move, domain: &WaitDomain) -> Undo {
    let mut undo = Undo {
        routes: Vec::new(),
        waits: Vec::new(),
    };
    let save_route = |sol: &FirstStageSolution, undo: &mut Undo, k: usize| {
        if !undo.routes.iter().any(|(j, _)| *j == k) {
            undo.routes.push((k, sol.routes[k].clone()));
        }
    };
    let save_wait = |sol: &FirstStageSolution, undo: &mut Undo, w: Vertex| {
        undo.waits.push((w, sol.wait_of(w)));
    };
    match *mv {
        Move::Relocate { from, to } => {
            save_route(sol, &mut undo, from.0);
            save_route(sol, &mut undo, to.0);
            let w = sol.routes[from.0].remove(from.1);
            sol.routes[to.0].insert(to.1, w);
        }
        Move::Swap { a, b } => {
            save_route(sol, &mut undo, a.0);
            save_route(sol, &mut undo, b.0);
            let (wa, wb) = (sol.routes[a.0][a.1], sol.routes[b.0][b.1]);
            sol.routes[a.0][a.1] = wb;
            sol.routes[b.0][b.1] = wa;
        }
        Move::InvertedTwoOpt { route, i, j } => {
            save_route(sol, &mut undo, route);
            sol.routes[route][i..=j].reverse();
        }
        Move::CrossExchange { a, b } => {
            save_route(sol, &mut undo, a.0);
            save_route(sol, &mut undo, b.0);
            let seg_a: Vec<Vertex> = sol.routes[a.0].drain(a.1..a.1 + a.2).collect();
            let seg_b: Vec<Vertex> = sol.routes[b.0].drain(b.1..b.1 + b.2).collect();
            sol.routes[a.0].splice(a.1..a.1, seg_b);
            sol.routes[b.0].splice(b.1..b.1, seg_a);
        }
        Move::Insert { vertex, at, wait } => {
            save_route(sol, &mut undo, at.0);
            save_wait(sol, &mut undo, vertex);
            sol.routes[at.0].insert(at.1, vertex);
            sol.wait.insert(vertex, wait);
        }
        Move::Delete { at } => {
            save_route(sol, &mut undo, at.0);
            let w = sol.routes[at.0].remove(at.1);
            save_wait(sol, &mut undo, w);
            sol.wait.remove(&w);
        }
        Move::IncreaseWait { vertex } => {
            save_wait(sol, &mut undo, vertex);
            let tau = wait(sol, vertex);
            sol.wait.insert(vertex, domain.up(tau, 1).expect("applicable move"));
        }
        Move::DecreaseWait { vertex } => {
            save_wait(sol, &mut undo, vertex);
            let tau = wait(sol, vertex);
            sol.wait.insert(vertex, domain.down(tau, 1).expect("applicable move"));
        }
        Move::TransferWait { from, to, steps } => {
            save_wait(sol, &mut undo, from);
            save_wait(sol, &mut undo, to);
            let (a, b) = (wait(sol, from), wait(sol, to));
            sol.wait.insert(from, domain.down(a, steps).expect("applicable move"));
            sol.wait.insert(to, domain.up(b, steps).expect("applicable move"));
        }
    }
    undo
}

pub fn undo_move(sol: &mut FirstStageSolution, undo: Undo) {
    for (k, route) in undo.routes {
        sol.routes[k] = route;
    }
    for (w, tau) in undo.waits.into_iter().rev() {
        match tau {
            Some(t) => sol.wait.insert(w, t),
            None => sol.wait.remove(&w),
        };
    }
}
