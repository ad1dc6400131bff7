use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sample_indexed, simulate, simulate_wait_and_serve};
use crate::model::{Instance, Plan};

/// Policy replayed by the Monte-Carlo estimator.
#[derive(Clone, Copy, Debug)]
pub enum Policy<'p, 'a> {
    Recourse(&'p Plan<'a>),
    WaitAndServe,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n)`; 0 for a single sample.
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Average number of rejected requests over `n_samples` scenarios of the
/// stream `seed`.
///
/// Scenario `i` depends only on `(seed, i)`, and the cost moments are
/// accumulated as integers, so the estimate does not depend on the number
/// of threads.
pub fn monte_carlo(policy: Policy<'_, '_>, instance: &Instance, n_samples: u64, seed: u64) -> MonteCarloEstimate {
    assert!(n_samples >= 1, "at least one sample");
    let cost = |i: u64| -> u64 {
        let scenario = sample_indexed(instance, seed, i);
        let outcome = match policy {
            Policy::Recourse(plan) => simulate(plan, &scenario),
            Policy::WaitAndServe => simulate_wait_and_serve(instance, &scenario),
        }
        .expect("scenario sampled from the same instance");
        outcome.rejected_count as u64
    };
    let (sum, sum_sq) = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let c = cost(i) as u128;
            (c, c * c)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    summarize(sum, sum_sq, n_samples, seed)
}

fn summarize(sum: u128, sum_sq: u128, n: u64, seed: u64) -> MonteCarloEstimate {
    let nf = n as f64;
    let mean = sum as f64 / nf;
    let std_error = if n < 2 {
        0.0
    } else {
        // n * sum_sq - sum^2 is exact and non-negative.
        let n = n as u128;
        let spread = n * sum_sq - sum * sum;
        let variance = spread as f64 / (nf * (nf - 1.0));
        (variance / nf).sqrt()
    };
    MonteCarloEstimate {
        mean,
        std_error,
        n_samples: n,
        seed,
    }
}
