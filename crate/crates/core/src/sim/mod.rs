//! Operational semantics: scenario sampling, recourse replay, the
//! wait-and-serve baseline and Monte-Carlo estimation.

mod monte_carlo;
mod recourse;
pub mod rng;
mod scenario;
mod wait_and_serve;

pub use monte_carlo::{monte_carlo, MonteCarloEstimate, Policy};
pub use recourse::{simulate, Disposition, EventKind, RejectReason, SimError, SimOutcome, TraceEvent};
pub use scenario::{sample_indexed, sample_scenario, Scenario};
pub use wait_and_serve::simulate_wait_and_serve;
