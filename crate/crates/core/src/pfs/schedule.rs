use std::fmt;

use super::{PfsError, ScaleConfig};
use crate::search::Budget;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stage {
    pub config: ScaleConfig,
    pub budget: Budget,
}

/// Static sequence of (alpha, beta, budget) stages.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicySchedule {
    pub name: String,
    pub stages: Vec<Stage>,
}

const A_STAR_B10: [(i64, i64); 3] = [(5, 10), (2, 10), (1, 10)];
const A1_B_STAR: [(i64, i64); 3] = [(1, 60), (1, 30), (1, 10)];
const A_STAR_B_STAR: [(i64, i64); 9] = [
    (5, 60),
    (2, 60),
    (1, 60),
    (5, 30),
    (2, 30),
    (1, 30),
    (5, 10),
    (2, 10),
    (1, 10),
];

impl PolicySchedule {
    /// Stages with the total budget split equally.
    pub fn from_grid(name: &str, grid: &[(i64, i64)], total: Budget) -> Result<Self, PfsError> {
        let share = total.split(grid.len());
        let schedule = Self {
            name: name.to_string(),
            stages: grid
                .iter()
                .map(|&(alpha, beta)| Stage {
                    config: ScaleConfig { alpha, beta },
                    budget: share,
                })
                .collect(),
        };
        schedule.validate()?;
        Ok(schedule)
    }

    pub fn a_star_b10(total: Budget) -> Self {
        Self::from_grid("a-star-b10", &A_STAR_B10, total).expect("valid preset")
    }

    pub fn a1_b_star(total: Budget) -> Self {
        Self::from_grid("a1-b-star", &A1_B_STAR, total).expect("valid preset")
    }

    pub fn a_star_b_star(total: Budget) -> Self {
        Self::from_grid("a-star-b-star", &A_STAR_B_STAR, total).expect("valid preset")
    }

    pub fn single(alpha: i64, beta: i64, total: Budget) -> Result<Self, PfsError> {
        Self::from_grid(&format!("single:{alpha}:{beta}"), &[(alpha, beta)], total)
    }

    /// Accepts `a-star-b10`, `a1-b-star`, `a-star-b-star` (dashes between
    /// `a`/`b` and `star` optional) and `single:A:B`.
    pub fn parse(name: &str, total: Budget) -> Result<Self, PfsError> {
        let key: String = name
            .to_ascii_lowercase()
            .replace("a-star", "astar")
            .replace("b-star", "bstar");
        match key.as_str() {
            "astar-b10" => Ok(Self::a_star_b10(total)),
            "a1-bstar" => Ok(Self::a1_b_star(total)),
            "astar-bstar" => Ok(Self::a_star_b_star(total)),
            _ => {
                let fields: Vec<&str> = key.split(':').collect();
                match fields.as_slice() {
                    ["single", a, b] => {
                        let parse = |s: &str| {
                            s.parse::<i64>()
                                .map_err(|_| PfsError::InvalidSchedule(format!("bad number '{s}' in '{name}'")))
                        };
                        Self::single(parse(a)?, parse(b)?, total)
                    }
                    _ => Err(PfsError::InvalidSchedule(format!("unknown schedule '{name}'"))),
                }
            }
        }
    }

    /// Non-empty, positive factors, and the last stage is the finest one.
    pub fn validate(&self) -> Result<(), PfsError> {
        let Some(last) = self.stages.last() else {
            return Err(PfsError::InvalidSchedule("no stages".into()));
        };
        for s in &self.stages {
            if s.config.alpha < 1 {
                return Err(PfsError::InvalidAlpha(s.config.alpha));
            }
            if s.config.beta < 1 {
                return Err(PfsError::InvalidSchedule(format!("beta {} below 1", s.config.beta)));
            }
        }
        let alpha_min = self.stages.iter().map(|s| s.config.alpha).min().unwrap_or(1);
        let beta_min = self.stages.iter().map(|s| s.config.beta).min().unwrap_or(1);
        if (last.config.alpha, last.config.beta) != (alpha_min, beta_min) {
            return Err(PfsError::InvalidSchedule(format!(
                "last stage ({}, {}) is not the finest ({alpha_min}, {beta_min})",
                last.config.alpha, last.config.beta
            )));
        }
        Ok(())
    }
}

impl fmt::Display for PolicySchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let s = PolicySchedule::parse("astar-bstar", Budget::Seconds(90.0)).unwrap();
        assert_eq!(s.stages.len(), 9);
        assert_eq!(s.stages[1].config, ScaleConfig { alpha: 2, beta: 60 });
        assert!(s.stages.iter().all(|st| st.budget == Budget::Seconds(10.0)));
        let s = PolicySchedule::parse("a-star-b10", Budget::Iterations(3000)).unwrap();
        assert_eq!(
            s.stages.iter().map(|st| st.config.alpha).collect::<Vec<_>>(),
            vec![5, 2, 1]
        );
        assert!(s.stages.iter().all(|st| st.budget == Budget::Iterations(1000)));
        let s = PolicySchedule::parse("a1-bstar", Budget::Seconds(3.0)).unwrap();
        assert_eq!(
            s.stages.iter().map(|st| st.config.beta).collect::<Vec<_>>(),
            vec![60, 30, 10]
        );
        let s = PolicySchedule::parse("single:2:30", Budget::Seconds(3.0)).unwrap();
        assert_eq!(s.stages.len(), 1);
        assert_eq!(s.stages[0].config, ScaleConfig { alpha: 2, beta: 30 });
        assert!(PolicySchedule::parse("single:0:30", Budget::Seconds(3.0)).is_err());
        assert!(PolicySchedule::parse("single:x:30", Budget::Seconds(3.0)).is_err());
        assert!(PolicySchedule::parse("fastest", Budget::Seconds(3.0)).is_err());
        assert!(PolicySchedule::from_grid("bad", &[(1, 10), (5, 60)], Budget::Seconds(1.0)).is_err());
    }
}
