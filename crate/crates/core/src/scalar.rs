//! Scalar types usable as edge-tuple weights.
//!
//! Weights are generic so that tiny instances can be checked with exact
//! rational arithmetic against brute-force oracles, while large runs use
//! `f64` with compensated summation.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, ToPrimitive, Zero};

/// A nonnegative weight scalar.
pub trait Weight:
    Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// Sums a sequence of weights. Floating point implementations use
    /// Neumaier compensated summation; exact types sum directly.
    fn sum_all<I: IntoIterator<Item = Self>>(iter: I) -> Self;

    /// Lossy conversion for reports. Never fails for the shipped types.
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts a finite `f64` into this type. Rationals take the exact
    /// binary value of the float.
    fn from_float(x: f64) -> Option<Self> {
        Self::from_f64(x)
    }

    fn is_valid_weight(&self) -> bool {
        *self >= Self::zero()
    }
}

macro_rules! float_weight {
    ($t:ty) => {
        impl Weight for $t {
            fn sum_all<I: IntoIterator<Item = Self>>(iter: I) -> Self {
                let mut sum: $t = 0.0;
                let mut comp: $t = 0.0;
                for x in iter {
                    let t = sum + x;
                    if sum.abs() >= x.abs() {
                        comp += (sum - t) + x;
                    } else {
                        comp += (x - t) + sum;
                    }
                    sum = t;
                }
                sum + comp
            }

            fn is_valid_weight(&self) -> bool {
                self.is_finite() && *self >= 0.0
            }
        }
    };
}

float_weight!(f64);
float_weight!(f32);

macro_rules! ratio_weight {
    ($t:ty) => {
        impl Weight for $t {
            fn sum_all<I: IntoIterator<Item = Self>>(iter: I) -> Self {
                iter.into_iter().fold(Self::zero(), |acc, x| acc + x)
            }
        }
    };
}

ratio_weight!(BigRational);
ratio_weight!(Ratio<i64>);

/// Exact rational from an integer numerator and denominator.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
