//! Probability scalars.
//!
//! The expectation engines and the brute-force oracle are generic over the
//! number type used for probabilities. `f64` is the working type, `f32` is
//! available for memory-bound runs and [`Exact`] (arbitrary precision
//! rationals) makes oracle comparisons exact on small instances.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Arbitrary precision rational probability.
pub type Exact = BigRational;

/// Number type usable as a probability mass.
pub trait Probability:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + AddAssign
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Converts a binary floating point probability. Exact types keep the
    /// full binary value, so `from_f64(0.1)` is not `1/10`.
    fn from_f64(value: f64) -> Self;

    fn to_f64(&self) -> f64;
}

impl Probability for f64 {
    #[inline]
    fn from_f64(value: f64) -> Self {
        value
    }

    #[inline]
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Probability for f32 {
    #[inline]
    fn from_f64(value: f64) -> Self {
        value as f32
    }

    #[inline]
    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Probability for BigRational {
    fn from_f64(value: f64) -> Self {
        BigRational::from_float(value).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Kahan compensated sum. For exact types the compensation term stays zero.
#[derive(Clone, Debug)]
pub struct CompensatedSum<T> {
    sum: T,
    compensation: T,
}

impl<T: Probability> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Probability> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            compensation: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, value: T) {
        let y = value - self.compensation.clone();
        let t = self.sum.clone() + y.clone();
        self.compensation = (t.clone() - self.sum.clone()) - y;
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum.clone()
    }
}

impl<T: Probability> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_beats_naive_on_many_small_terms() {
        let mut naive = 1.0f64;
        let mut acc = CompensatedSum::<f64>::new();
        acc.add(1.0);
        for _ in 0..1_000_000 {
            naive += 1e-16;
            acc.add(1e-16);
        }
        assert_eq!(naive, 1.0);
        assert!((acc.value() - (1.0 + 1e-10)).abs() < 1e-15);
    }

    #[test]
    fn exact_conversion_keeps_binary_value() {
        let half = <Exact as Probability>::from_f64(0.5);
        assert_eq!(half, BigRational::new(1.into(), 2.into()));
        let tenth = <Exact as Probability>::from_f64(0.1);
        assert_ne!(tenth, BigRational::new(1.into(), 10.into()));
        assert_eq!(Probability::to_f64(&tenth), 0.1);
    }

    #[test]
    fn exact_compensation_is_zero() {
        let third = BigRational::new(1.into(), 3.into());
        let s: CompensatedSum<Exact> = std::iter::repeat(third).take(3).collect();
        assert_eq!(s.value(), BigRational::one());
    }
}
