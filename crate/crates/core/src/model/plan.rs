use super::{
    assign_requests, compute_schedule, Assignment, FirstStageSolution, Instance, ModelError, RouteSchedule, Strategy,
};

/// A first-stage solution together with its schedule and the assignment of
/// requests for one recourse strategy.
#[derive(Clone, Debug)]
pub struct Plan<'a> {
    pub instance: &'a Instance,
    pub solution: &'a FirstStageSolution,
    pub schedule: RouteSchedule,
    pub assignment: Assignment,
}

impl<'a> Plan<'a> {
    pub fn new(
        strategy: Strategy,
        instance: &'a Instance,
        solution: &'a FirstStageSolution,
    ) -> Result<Self, ModelError> {
        if solution.routes.len() > instance.fleet() {
            return Err(ModelError::FleetMismatch {
                routes: solution.routes.len(),
                fleet: instance.fleet(),
            });
        }
        let schedule = compute_schedule(solution, instance)?;
        let assignment = assign_requests(strategy, solution, &schedule, instance);
        Ok(Self {
            instance,
            solution,
            schedule,
            assignment,
        })
    }

    pub fn strategy(&self) -> Strategy {
        self.assignment.strategy()
    }
}
