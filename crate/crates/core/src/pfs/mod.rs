//! Progressive focus search: a sequence of local searches on coarsened
//! problems, from a rough time resolution and sparse waiting-time domain
//! towards the original problem.

mod run;
mod scale;
mod schedule;

pub use run::{pfs_run, write_stage_csv, PfsResult, StageReport};
pub use scale::{adapt_solution, reduced_wait_domain, scale_instance, scaled_problem, ScaleConfig};
pub use schedule::{PolicySchedule, Stage};

use thiserror::Error;

use crate::expectation::EvalError;
use crate::model::ModelError;
use crate::search::SearchError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PfsError {
    #[error("scale factor must be >= 1, got {0}")]
    InvalidAlpha(i64),
    #[error("waiting-time granularity {beta} must lie in [1, {horizon}]")]
    InvalidBeta { beta: i64, horizon: i64 },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("stage {stage} (alpha={alpha}, beta={beta}): {source}")]
    Stage {
        stage: usize,
        alpha: i64,
        beta: i64,
        source: SearchError,
    },
}
