//! Simulated-annealing local search over first-stage solutions and an
//! exact enumerator for small instances.

mod anneal;
mod domain;
mod exact;
mod moves;

pub use anneal::{
    cold_start, evaluate_hybrid, local_search, write_trace_csv, Budget, EvalMode, HybridScore, SearchParams,
    SearchResult, TracePoint,
};
pub use domain::WaitDomain;
pub use exact::{exact_enumerate, restricted_candidate_count, unrestricted_candidate_count, ExactParams, ExactResult};
pub use moves::{apply_move, sample_move, undo_move, Move, MoveKind, Undo};

use thiserror::Error;

use crate::expectation::{EvalError, ScaleTag};
use crate::model::Instance;

/// An instance together with the waiting-time domain the search draws
/// from and the scale it was built at.
#[derive(Clone, Debug)]
pub struct Problem {
    pub instance: Instance,
    pub domain: WaitDomain,
    pub scale: ScaleTag,
}

impl Problem {
    /// The instance at its own resolution, every waiting time allowed.
    pub fn unscaled(instance: Instance) -> Self {
        let domain = WaitDomain::full(instance.horizon());
        Self {
            instance,
            domain,
            scale: ScaleTag::default(),
        }
    }

    /// Weight of the horizon overshoot in the penalized objective: larger
    /// than any possible expected cost.
    pub fn default_penalty(&self) -> f64 {
        self.instance.expected_requests() + 1.0
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("invalid search parameters: {0}")]
    InvalidParams(String),
    #[error("budget refused: {0}")]
    Budget(String),
    #[error("start solution is malformed: {0}")]
    InvalidStart(EvalError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("incremental cost {incremental} differs from scratch cost {scratch} at iteration {iteration}")]
    Inconsistent {
        iteration: u64,
        incremental: f64,
        scratch: f64,
    },
}
