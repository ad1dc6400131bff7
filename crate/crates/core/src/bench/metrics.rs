use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative improvement of a first-stage solution over the wait-and-serve
/// policy, in percent. `None` when the policy rejects nothing on average.
pub fn gain(expected_cost: f64, ws_average: f64) -> Option<f64> {
    (ws_average > 0.0).then(|| 100.0 * (ws_average - expected_cost) / ws_average)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("method {method} has cost {cost} on instance {instance}; profiles need positive costs")]
    NonPositive { method: usize, instance: usize, cost: f64 },
    #[error("cost rows have different lengths")]
    Ragged,
}

/// Fraction of instances on which a method is within a factor `x` of the
/// best method, as a right-continuous step function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerformanceProfile {
    pub method: String,
    /// `(x, y)` breakpoints with strictly increasing `x`, starting at
    /// `x = 1`.
    pub points: Vec<(f64, f64)>,
}

impl PerformanceProfile {
    pub fn fraction_at(&self, x: f64) -> f64 {
        self.points.iter().take_while(|p| p.0 <= x).last().map_or(0.0, |p| p.1)
    }
}

/// Profiles of every method from a method × instance cost matrix. An
/// infinite cost marks an unsolved instance: it never counts.
pub fn performance_profile(methods: &[String], costs: &[Vec<f64>]) -> Result<Vec<PerformanceProfile>, ProfileError> {
    let Some(first) = costs.first() else {
        return Ok(Vec::new());
    };
    let instances = first.len();
    if costs.iter().any(|row| row.len() != instances) {
        return Err(ProfileError::Ragged);
    }
    for (method, row) in costs.iter().enumerate() {
        for (instance, &cost) in row.iter().enumerate() {
            if !(cost > 0.0) {
                return Err(ProfileError::NonPositive { method, instance, cost });
            }
        }
    }
    let best: Vec<f64> = (0..instances)
        .map(|i| costs.iter().map(|row| row[i]).fold(f64::INFINITY, f64::min))
        .collect();
    Ok(methods
        .iter()
        .zip(costs)
        .map(|(name, row)| {
            let mut ratios: Vec<f64> = row
                .iter()
                .zip(&best)
                .map(|(&c, &b)| c / b)
                .filter(|r| r.is_finite())
                .collect();
            ratios.sort_by(f64::total_cmp);
            let n = instances.max(1) as f64;
            let mut points = vec![(1.0, ratios.iter().filter(|&&r| r <= 1.0).count() as f64 / n)];
            for (k, &r) in ratios.iter().enumerate() {
                if r <= 1.0 {
                    continue;
                }
                let y = (k + 1) as f64 / n;
                match points.last_mut() {
                    Some(last) if last.0 == r => last.1 = y,
                    _ => points.push((r, y)),
                }
            }
            PerformanceProfile {
                method: name.clone(),
                points,
            }
        })
        .collect())
}

/// `method,x,y` rows.
pub fn write_profiles_csv<W: Write>(profiles: &[PerformanceProfile], mut out: W) -> io::Result<()> {
    writeln!(out, "method,x,y")?;
    for p in profiles {
        for &(x, y) in &p.points {
            writeln!(out, "{},{x},{y}", p.method)?;
        }
    }
    Ok(())
}
