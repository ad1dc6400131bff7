use rayon::prelude::*;

use super::cost::{ExpectedCost, ScaleTag};
use super::EvalError;
use crate::model::Plan;
use crate::scalar::{CompensatedSum, Probability};
use crate::sim::{simulate, Scenario};

/// Default limit on the number of uncertain requests (`0 < p < 1`).
pub const ENUMERATION_BUDGET: usize = 22;

/// Scenarios per parallel chunk; chunk results are combined in order so
/// the result does not depend on the thread count.
const CHUNK: u64 = 1 << 10;

/// Expected cost by replaying every scenario through the simulator and
/// weighting it by its probability. Requests with `p = 1` are always
/// revealed and requests with `p = 0` never are, so only the uncertain ones
/// are enumerated.
pub fn brute_force_expected_cost<T: Probability>(plan: &Plan<'_>, budget: usize) -> Result<ExpectedCost<T>, EvalError> {
    let instance = plan.instance;
    let requests = instance.requests();
    let uncertain: Vec<usize> = requests
        .iter()
        .filter(|r| r.probability > 0.0 && r.probability < 1.0)
        .map(|r| r.id)
        .collect();
    if uncertain.len() > budget {
        return Err(EvalError::Budget {
            uncertain: uncertain.len(),
            limit: budget,
        });
    }
    let base: Vec<bool> = requests.iter().map(|r| r.probability >= 1.0).collect();
    let p: Vec<T> = uncertain
        .iter()
        .map(|&r| T::from_f64(requests[r].probability))
        .collect();
    let np: Vec<T> = p.iter().map(|x| T::one() - x.clone()).collect();
    let count = 1u64 << uncertain.len();

    let chunks: Vec<Result<(T, Vec<T>), EvalError>> = (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut total = CompensatedSum::new();
            let mut accepted = vec![CompensatedSum::new(); requests.len()];
            for mask in chunk * CHUNK..((chunk + 1) * CHUNK).min(count) {
                let mut revealed = base.clone();
                let mut weight = T::one();
                for (bit, &r) in uncertain.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        revealed[r] = true;
                        weight = weight * p[bit].clone();
                    } else {
                        weight = weight * np[bit].clone();
                    }
                }
                let outcome = simulate(plan, &Scenario::from_mask(revealed))?;
                if outcome.rejected_count > 0 {
                    total.add(weight.clone() * T::from_f64(outcome.rejected_count as f64));
                }
                for &r in &outcome.accepted {
                    accepted[r].add(weight.clone());
                }
            }
            Ok((total.value(), accepted.into_iter().map(|s| s.value()).collect()))
        })
        .collect();

    let mut total = CompensatedSum::new();
    let mut per_request = vec![CompensatedSum::new(); requests.len()];
    for chunk in chunks {
        let (t, acc) = chunk?;
        total.add(t);
        for (s, a) in per_request.iter_mut().zip(acc) {
            s.add(a);
        }
    }
    Ok(ExpectedCost {
        total: total.value(),
        per_request: per_request.into_iter().map(|s| s.value()).collect(),
        strategy: plan.strategy(),
        scale: ScaleTag::default(),
        overshoot: plan.schedule.total_overshoot(),
    })
}
