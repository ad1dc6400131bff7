//! Solver toolkit for the static and stochastic vehicle routing problem
//! with time windows, random customers and reveal times.
//!
//! The numeric core is generic over the probability scalar; the aliases
//! below fix it to `f64`, `f32` or exact rationals.

pub mod bench;
pub mod expectation;
pub mod model;
pub mod pfs;
pub mod scalar;
pub mod search;
pub mod sim;

pub use scalar::Exact;

pub type ExpectedCostF64 = expectation::ExpectedCost<f64>;
pub type ExpectedCostF32 = expectation::ExpectedCost<f32>;
pub type ExpectedCostExact = expectation::ExpectedCost<Exact>;
pub type EvaluatorF64<'a> = expectation::Evaluator<'a, f64>;
pub type EvaluatorExact<'a> = expectation::Evaluator<'a, Exact>;
pub type LayerF64 = expectation::Layer<f64>;
