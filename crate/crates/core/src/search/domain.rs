use rand::Rng;

use crate::model::Time;

/// Ascending set of admissible waiting durations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WaitDomain {
    values: Vec<Time>,
}

impl WaitDomain {
    /// Sorts and deduplicates; `None` when empty or containing values < 1.
    pub fn new(mut values: Vec<Time>) -> Option<Self> {
        values.sort_unstable();
        values.dedup();
        if values.is_empty() || values[0] < 1 {
            return None;
        }
        Some(Self { values })
    }

    /// Every duration `1..=h`.
    pub fn full(h: Time) -> Self {
        Self {
            values: (1..=h.max(1)).collect(),
        }
    }

    pub fn values(&self) -> &[Time] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> Time {
        self.values[0]
    }

    pub fn max(&self) -> Time {
        *self.values.last().expect("non-empty domain")
    }

    pub fn contains(&self, tau: Time) -> bool {
        self.values.binary_search(&tau).is_ok()
    }

    /// Number of values strictly below `tau`.
    pub fn count_below(&self, tau: Time) -> usize {
        self.values.partition_point(|&v| v < tau)
    }

    /// Number of values strictly above `tau`.
    pub fn count_above(&self, tau: Time) -> usize {
        self.values.len() - self.values.partition_point(|&v| v <= tau)
    }

    /// The `steps`-th value above `tau`.
    pub fn up(&self, tau: Time, steps: usize) -> Option<Time> {
        let first = self.values.partition_point(|&v| v <= tau);
        self.values.get(first + steps.checked_sub(1)?).copied()
    }

    /// The `steps`-th value below `tau`.
    pub fn down(&self, tau: Time, steps: usize) -> Option<Time> {
        let below = self.count_below(tau);
        below.checked_sub(steps).map(|i| self.values[i])
    }

    /// Largest value `<= limit`.
    pub fn max_at_most(&self, limit: Time) -> Option<Time> {
        self.count_below(limit + 1).checked_sub(1).map(|i| self.values[i])
    }

    /// Closest value to `tau`, the smaller one on ties.
    pub fn nearest(&self, tau: Time) -> Time {
        let i = self.values.partition_point(|&v| v < tau);
        match (i.checked_sub(1).map(|j| self.values[j]), self.values.get(i)) {
            (Some(lo), Some(&hi)) => {
                if tau - lo <= hi - tau {
                    lo
                } else {
                    hi
                }
            }
            (Some(lo), None) => lo,
            (None, Some(&hi)) => hi,
            (None, None) => unreachable!("non-empty domain"),
        }
    }

    pub fn random<R: Rng>(&self, rng: &mut R) -> Time {
        self.values[rng.random_range(0..self.values.len())]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stepping_and_snapping() {
        let d = WaitDomain::new(vec![60, 30, 90, 30]).unwrap();
        assert_eq!(d.values(), &[30, 60, 90]);
        assert_eq!(d.up(30, 1), Some(60));
        assert_eq!(d.up(45, 1), Some(60));
        assert_eq!(d.up(45, 2), Some(90));
        assert_eq!(d.up(90, 1), None);
        assert_eq!(d.up(30, 0), None);
        assert_eq!(d.down(90, 2), Some(30));
        assert_eq!(d.down(30, 1), None);
        assert_eq!(d.max_at_most(89), Some(60));
        assert_eq!(d.max_at_most(29), None);
        assert_eq!(d.nearest(45), 30);
        assert_eq!(d.nearest(46), 60);
        assert_eq!(d.nearest(500), 90);
        assert_eq!((d.count_below(60), d.count_above(60)), (1, 1));
        assert!(WaitDomain::new(vec![]).is_none());
        assert!(WaitDomain::new(vec![0, 5]).is_none());
    }
}
