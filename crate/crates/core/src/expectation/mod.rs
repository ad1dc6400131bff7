//! Exact expected number of rejected requests.
//!
//! The engines propagate, waiting vertex by waiting vertex along each
//! route, the joint distribution of the vehicle's availability (location,
//! time and load) over the requests assigned to that vertex. The load
//! distribution left after the last request of a vertex is carried to the
//! next one. A brute-force enumerator over scenarios serves as the oracle.

mod brute;
mod cost;
mod engine;
mod incremental;
mod layer;
mod reduction;

pub use brute::{brute_force_expected_cost, ENUMERATION_BUDGET};
pub use cost::{
    expected_cost, expected_cost_rq, expected_cost_rqplus, probability_layers, visit_probability_layers, ExpectedCost,
    MemoryMode, RequestLayers, ScaleTag,
};
pub use incremental::{EvalStats, Evaluator};
pub use layer::Layer;
pub use reduction::{unit_demand_load_distribution, LoadTable, RECURSION_TOLERANCE};

use thiserror::Error;

use crate::model::{ModelError, Strategy};
use crate::sim::SimError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("plan was built for {found}, engine needs {expected}")]
    StrategyMismatch { expected: Strategy, found: Strategy },
    #[error("incremental updates need full memory mode")]
    UnsupportedMode,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{uncertain} uncertain requests exceed the enumeration budget of {limit}")]
    Budget { uncertain: usize, limit: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("load recursion violated by {residual:e}")]
    RecursionMismatch { residual: f64 },
}
