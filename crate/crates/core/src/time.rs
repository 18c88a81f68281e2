//! Exact, non-negative simulation time in milliseconds.
//!
//! Quantum means such as `(10 + 14 + 70) / 3` are not integers, and the
//! remaining burst of a preempted process inherits that fraction. Every
//! instant and duration in the simulator is therefore an exact rational.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Non-negative rational number of milliseconds, always in reduced form.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Time(BigRational);

impl Time {
    pub fn zero() -> Self {
        Time(BigRational::zero())
    }

    pub fn from_ms(ms: u64) -> Self {
        Time(BigRational::from_integer(BigInt::from(ms)))
    }

    /// `numer / denom` milliseconds. `None` when `denom` is zero.
    pub fn from_fraction(numer: u64, denom: u64) -> Option<Self> {
        if denom == 0 {
            return None;
        }
        Some(Time(BigRational::new(numer.into(), denom.into())))
    }

    /// Wraps a rational, rejecting negative values.
    pub fn from_rational(value: BigRational) -> Option<Self> {
        if value.is_negative() {
            None
        } else {
            Some(Time(value))
        }
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Whole milliseconds, if this value is an integer that fits in `u64`.
    pub fn to_ms(&self) -> Option<u64> {
        if self.0.is_integer() {
            self.0.to_integer().to_u64()
        } else {
            None
        }
    }

    /// Lossy conversion for plotting and summaries; never used for decisions.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn checked_sub(&self, rhs: &Time) -> Option<Time> {
        Time::from_rational(&self.0 - &rhs.0)
    }

    /// Arithmetic mean; `None` for an empty input.
    pub fn mean<'a, I>(values: I) -> Option<Time>
    where
        I: IntoIterator<Item = &'a Time>,
    {
        let mut sum = Time::zero();
        let mut count = 0u64;
        for v in values {
            sum += v;
            count += 1;
        }
        (count > 0).then(|| sum / count)
    }
}

impl From<u64> for Time {
    fn from(ms: u64) -> Self {
        Time::from_ms(ms)
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::decimal::render(&self.0))
    }
}

impl fmt::Debug for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Time({self})")
    }
}

impl Add<&Time> for &Time {
    type Output = Time;
    fn add(self, rhs: &Time) -> Time {
        Time(&self.0 + &rhs.0)
    }
}

impl Add for Time {
    type Output = Time;
    fn add(self, rhs: Time) -> Time {
        Time(self.0 + rhs.0)
    }
}

impl Add<&Time> for Time {
    type Output = Time;
    fn add(self, rhs: &Time) -> Time {
        Time(self.0 + &rhs.0)
    }
}

impl AddAssign<&Time> for Time {
    fn add_assign(&mut self, rhs: &Time) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Time {
    fn add_assign(&mut self, rhs: Time) {
        self.0 += rhs.0;
    }
}

/// Panics if the result would be negative; use [`Time::checked_sub`] when
/// that is possible.
impl Sub<&Time> for &Time {
    type Output = Time;
    fn sub(self, rhs: &Time) -> Time {
        self.checked_sub(rhs)
            .unwrap_or_else(|| panic!("negative time: {self} - {rhs}"))
    }
}

impl Sub for Time {
    type Output = Time;
    fn sub(self, rhs: Time) -> Time {
        &self - &rhs
    }
}

impl Sub<&Time> for Time {
    type Output = Time;
    fn sub(self, rhs: &Time) -> Time {
        &self - rhs
    }
}

impl SubAssign<&Time> for Time {
    fn sub_assign(&mut self, rhs: &Time) {
        *self = &*self - rhs;
    }
}

impl Mul<u64> for &Time {
    type Output = Time;
    fn mul(self, k: u64) -> Time {
        Time(&self.0 * BigRational::from_integer(k.into()))
    }
}

impl Mul<u64> for Time {
    type Output = Time;
    fn mul(self, k: u64) -> Time {
        &self * k
    }
}

/// Panics on division by zero.
impl Div<u64> for &Time {
    type Output = Time;
    fn div(self, k: u64) -> Time {
        assert!(k > 0, "time divided by zero");
        Time(&self.0 / BigRational::from_integer(k.into()))
    }
}

impl Div<u64> for Time {
    type Output = Time;
    fn div(self, k: u64) -> Time {
        &self / k
    }
}

impl Sum for Time {
    fn sum<I: Iterator<Item = Time>>(iter: I) -> Time {
        iter.fold(Time::zero(), |acc, t| acc + t)
    }
}

impl<'a> Sum<&'a Time> for Time {
    fn sum<I: Iterator<Item = &'a Time>>(iter: I) -> Time {
        iter.fold(Time::zero(), |acc, t| acc + t)
    }
}
