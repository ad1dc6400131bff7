//! Problem data, first-stage solutions, schedules and request assignment.

mod assignment;
mod instance;
pub mod io;
mod order;
mod plan;
mod schedule;
mod solution;
mod validate;

pub use assignment::{assign_requests, feasibility_window, Assignment, Strategy, Window};
pub use instance::{Capacity, Instance, InstanceParts, PotentialRequest, RequestId, Time, Vertex, DEPOT};
pub use order::order_requests;
pub use plan::Plan;
pub use schedule::{compute_schedule, RouteSchedule, RouteTimes, Visit, DEPOT_DEPARTURE};
pub use solution::FirstStageSolution;
pub use validate::{validate_first_stage, ValidationReport, Violation};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("request {request}: {reason}")]
    InvalidRequest { request: RequestId, reason: String },
    #[error("travel matrix has {found} entries, expected {expected}")]
    TravelMatrixSize { expected: usize, found: usize },
    #[error("travel time d[{from}][{to}] = {value} is invalid")]
    InvalidTravel { from: Vertex, to: Vertex, value: Time },
    #[error("{0}")]
    InvalidParameter(String),
    #[error("vertex {0} is not a waiting vertex")]
    UnknownWaitingVertex(Vertex),
    #[error("waiting vertex {0} is visited more than once")]
    DuplicateVertex(Vertex),
    #[error("no waiting time for visited vertex {0}")]
    MissingWait(Vertex),
    #[error("waiting time {wait} at vertex {vertex} is below 1")]
    InvalidWait { vertex: Vertex, wait: Time },
    #[error("solution has {routes} routes but the fleet has {fleet} vehicles")]
    FleetMismatch { routes: usize, fleet: usize },
}
