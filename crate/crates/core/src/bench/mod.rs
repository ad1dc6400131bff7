//! Benchmark tooling: instance generation, gains, performance profiles
//! and experiment runs.

pub mod experiment;
pub mod generator;
pub mod metrics;
pub mod random;
pub mod solve;

pub use experiment::{run_experiment, ExperimentSpec, ResultRow, ENGINE_VERSION};
pub use generator::{generate_instance, GeneratorConfig, GeneratorError, PointSet, PointSource};
pub use metrics::{gain, performance_profile, write_profiles_csv, PerformanceProfile, ProfileError};
pub use solve::{score_both, solve, Method, SolveError, SolveOutcome};
