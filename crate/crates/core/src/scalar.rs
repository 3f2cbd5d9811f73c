//! Numeric abstraction shared by every stage of the pipeline.
//!
//! Membership degrees, utilities, list sums and ratios are all computed in a
//! single scalar type `T`. Binary floating point (`f64`, `f32`) is the normal
//! choice; [`crate::Exact`] (`Ratio<i64>`) reproduces every
//! value as an exact rational, which the tests use to compare the miner and
//! the reference enumeration without tolerances.

use std::fmt::Debug;

use num_traits::{FromPrimitive, Num, ToPrimitive, Zero};

/// Field-like number usable as a utility or membership degree.
pub trait Scalar:
    Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// Converts an integer quantity. Panics only if the type cannot hold `n`.
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("quantity not representable in scalar type")
    }

    /// Lossy view used for reporting and rounding.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Rounds half away from zero to two decimal places, producing `n / 100`
    /// exactly in the target type.
    fn round_hundredths(self) -> Self {
        let hundred = Self::from_count(100);
        let scaled = (self * hundred).as_f64().round() as i64;
        Self::from_i64(scaled).expect("rounded value not representable") / hundred
    }

    /// Amount by which a ratio may fall short of the threshold and still
    /// count as reaching it. Zero for exact types; for floats it absorbs the
    /// rounding that different summation orders introduce.
    fn threshold_slack() -> Self;

    /// Threshold actually compared against once the slack is applied.
    fn threshold_cut(gamma: Self) -> Self {
        (gamma - Self::threshold_slack()).max_of(Self::zero())
    }
}

impl Scalar for f64 {
    fn threshold_slack() -> Self {
        1e-10
    }
}

impl Scalar for f32 {
    fn threshold_slack() -> Self {
        1e-5
    }
}

macro_rules! exact_scalar {
    ($($int:ty),*) => {$(
        impl Scalar for num_rational::Ratio<$int> {
            fn threshold_slack() -> Self {
                Self::zero()
            }
        }
    )*};
}

exact_scalar!(i32, i64, isize);

/// Sums an iterator of scalars left to right.
pub fn sum<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    values.into_iter().fold(T::zero(), |acc, v| acc + v)
}
