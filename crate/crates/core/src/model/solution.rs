use std::collections::BTreeMap;

use super::{Time, Vertex};

/// A priori plan: one sequence of waiting vertices per vehicle plus a
/// waiting duration for every visited vertex. Routes implicitly start and
/// end at the depot; empty routes are idle vehicles.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FirstStageSolution {
    pub routes: Vec<Vec<Vertex>>,
    pub wait: BTreeMap<Vertex, Time>,
}

impl FirstStageSolution {
    /// `fleet` empty routes.
    pub fn empty(fleet: usize) -> Self {
        Self {
            routes: vec![Vec::new(); fleet],
            wait: BTreeMap::new(),
        }
    }

    pub fn visited(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.routes.iter().flatten().copied()
    }

    pub fn visited_count(&self) -> usize {
        self.routes.iter().map(Vec::len).sum()
    }

    pub fn wait_of(&self, w: Vertex) -> Option<Time> {
        self.wait.get(&w).copied()
    }

    /// Route index and position of a visited vertex.
    pub fn locate(&self, w: Vertex) -> Option<(usize, usize)> {
        self.routes
            .iter()
            .enumerate()
            .find_map(|(k, route)| route.iter().position(|&v| v == w).map(|p| (k, p)))
    }

    /// Drops waiting durations of vertices no longer visited.
    pub fn prune_waits(&mut self) {
        let visited: std::collections::BTreeSet<Vertex> = self.visited().collect();
        self.wait.retain(|w, _| visited.contains(w));
    }
}
