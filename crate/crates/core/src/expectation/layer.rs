use crate::model::Time;
use crate::scalar::Probability;

/// Probability mass over `(location, time, load)` restricted to a time
/// range. Location 0 is the waiting vertex; under the chaining strategy
/// location `i > 0` is the customer of the `i`-th request of that vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer<T> {
    pub t0: Time,
    pub nt: usize,
    pub nq: usize,
    pub locs: usize,
    pub data: Vec<T>,
}

impl<T: Probability> Layer<T> {
    pub fn zeros(locs: usize, t0: Time, nt: usize, nq: usize) -> Self {
        Self {
            t0,
            nt,
            nq,
            locs,
            data: vec![T::zero(); locs * nt * nq],
        }
    }

    /// All mass at location 0 and time `t`, distributed over loads as `loads`.
    pub fn point(t: Time, loads: &[T]) -> Self {
        Self {
            t0: t,
            nt: 1,
            nq: loads.len(),
            locs: 1,
            data: loads.to_vec(),
        }
    }

    #[inline]
    pub fn times(&self) -> impl Iterator<Item = Time> + Clone {
        self.t0..self.t0 + self.nt as Time
    }

    #[inline]
    pub fn row(&self, loc: usize, t: Time) -> &[T] {
        let i = (loc * self.nt + (t - self.t0) as usize) * self.nq;
        &self.data[i..i + self.nq]
    }

    #[inline]
    pub fn row_mut(&mut self, loc: usize, t: Time) -> &mut [T] {
        let i = (loc * self.nt + (t - self.t0) as usize) * self.nq;
        &mut self.data[i..i + self.nq]
    }

    pub fn get(&self, loc: usize, t: Time, q: usize) -> T {
        if loc >= self.locs || t < self.t0 || t >= self.t0 + self.nt as Time || q >= self.nq {
            return T::zero();
        }
        self.row(loc, t)[q].clone()
    }

    /// Sum over locations and times, per load.
    pub fn load_marginal(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.nq];
        for chunk in self.data.chunks_exact(self.nq) {
            for (o, x) in out.iter_mut().zip(chunk) {
                if !x.is_zero() {
                    *o += x.clone();
                }
            }
        }
        out
    }

    pub fn total(&self) -> T {
        crate::scalar::CompensatedSum::from_iter(self.data.iter().cloned()).value()
    }
}

#[inline]
pub(crate) fn row_is_zero<T: Probability>(row: &[T]) -> bool {
    row.iter().all(|x| x.is_zero())
}
