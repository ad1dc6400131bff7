use super::PfsError;
use crate::expectation::ScaleTag;
use crate::model::{FirstStageSolution, Instance, InstanceParts, PotentialRequest, Time};
use crate::search::{Problem, WaitDomain};

/// Temporal scale factor `alpha` and waiting-time granularity `beta`
/// (minutes at scale 1).
pub type ScaleConfig = ScaleTag;

fn ceil_div(v: Time, a: Time) -> Time {
    (v + a - 1).div_euclid(a)
}

fn round_div(v: Time, a: Time) -> Time {
    (2 * v + a).div_euclid(2 * a)
}

/// Divides every temporal datum by `alpha`. Travel times, service times,
/// reveal times and window starts round up, window ends round down and the
/// horizon rounds to nearest, so that a plan feasible at this scale is
/// feasible at scale 1. Requests whose window empties are kept.
pub fn scale_instance(instance: &Instance, alpha: i64) -> Result<Instance, PfsError> {
    if alpha < 1 {
        return Err(PfsError::InvalidAlpha(alpha));
    }
    if alpha == 1 {
        return Ok(instance.clone());
    }
    let parts = instance.parts();
    let requests = parts
        .requests
        .iter()
        .map(|r| PotentialRequest {
            reveal: ceil_div(r.reveal, alpha),
            service: ceil_div(r.service, alpha),
            tw_start: ceil_div(r.tw_start, alpha),
            tw_end: r.tw_end.div_euclid(alpha),
            ..r.clone()
        })
        .collect();
    Ok(Instance::new_relaxed(InstanceParts {
        horizon: round_div(parts.horizon, alpha).max(1),
        travel: parts.travel.iter().map(|&d| ceil_div(d, alpha)).collect(),
        requests,
        ..parts
    })?)
}

/// `{round(i/alpha) : i in [1, h], i mod beta = 0}` without zeros.
pub fn reduced_wait_domain(h: Time, alpha: i64, beta: i64) -> Result<WaitDomain, PfsError> {
    if alpha < 1 {
        return Err(PfsError::InvalidAlpha(alpha));
    }
    if beta < 1 || beta > h {
        return Err(PfsError::InvalidBeta { beta, horizon: h });
    }
    let values = (1..=h / beta)
        .map(|k| round_div(k * beta, alpha))
        .filter(|&v| v >= 1)
        .collect();
    WaitDomain::new(values).ok_or(PfsError::InvalidBeta { beta, horizon: h })
}

/// The problem solved at one stage.
pub fn scaled_problem(base: &Instance, config: ScaleConfig) -> Result<Problem, PfsError> {
    Ok(Problem {
        instance: scale_instance(base, config.alpha)?,
        domain: reduced_wait_domain(base.horizon(), config.alpha, config.beta)?,
        scale: config,
    })
}

/// Nearest value of `domain` to `num/den`, the smaller one on ties.
fn snap(domain: &WaitDomain, num: Time, den: Time) -> Time {
    let mut best = domain.min();
    let mut best_gap = (num - best * den).abs();
    for &v in domain.values() {
        let gap = (num - v * den).abs();
        if gap < best_gap {
            best = v;
            best_gap = gap;
        }
    }
    best
}

/// Moves a solution between scales: routes unchanged, waiting times
/// multiplied by `from.alpha / to.alpha` and snapped to the target domain.
/// The result may exceed the horizon.
pub fn adapt_solution(
    solution: &FirstStageSolution,
    from: ScaleConfig,
    to: ScaleConfig,
    base: &Instance,
) -> Result<FirstStageSolution, PfsError> {
    if from == to {
        return Ok(solution.clone());
    }
    let domain = reduced_wait_domain(base.horizon(), to.alpha, to.beta)?;
    let mut adapted = solution.clone();
    for tau in adapted.wait.values_mut() {
        *tau = snap(&domain, *tau * from.alpha, to.alpha);
    }
    Ok(adapted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_rules() {
        assert_eq!(ceil_div(7, 2), 4);
        assert_eq!(7i64.div_euclid(2), 3);
        assert_eq!(round_div(480, 5), 96);
        assert_eq!(round_div(481, 2), 241);
        assert_eq!(round_div(5, 2), 3);
    }

    #[test]
    fn domain_examples() {
        let d = reduced_wait_domain(480, 1, 60).unwrap();
        assert_eq!(d.values(), &[60, 120, 180, 240, 300, 360, 420, 480]);
        assert_eq!(reduced_wait_domain(480, 1, 10).unwrap().len(), 48);
        assert_eq!(reduced_wait_domain(480, 1, 30).unwrap().len(), 16);
        let d = reduced_wait_domain(480, 2, 60).unwrap();
        assert_eq!(d.values(), &[30, 60, 90, 120, 150, 180, 210, 240]);
        assert_eq!(reduced_wait_domain(480, 5, 60).unwrap().values()[0], 12);
        assert!(matches!(
            reduced_wait_domain(480, 1, 481),
            Err(PfsError::InvalidBeta { .. })
        ));
        assert!(matches!(
            reduced_wait_domain(480, 0, 10),
            Err(PfsError::InvalidAlpha(0))
        ));
    }

    #[test]
    fn domains_nest_when_beta_divides() {
        for alpha in [1, 2, 5] {
            for (fine, coarse) in [(10, 30), (10, 60), (30, 60), (7, 21)] {
                let f = reduced_wait_domain(480, alpha, fine).unwrap();
                let c = reduced_wait_domain(480, alpha, coarse).unwrap();
                assert!(c.values().iter().all(|&v| f.contains(v)), "{alpha} {fine} {coarse}");
            }
        }
    }
}
