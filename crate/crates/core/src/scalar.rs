//! Scalar abstractions.
//!
//! Geometric decisions run over any exact ordered field ([`ExactField`]),
//! in practice [`BigRational`](num_rational::BigRational). Numerical code
//! (ODE, drifts, propensities) is generic over [`num_traits::Float`].

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_integer::Integer;
use num_traits::{Float, FromPrimitive, Num, One, Signed, ToPrimitive};

/// An ordered field with exact arithmetic.
pub trait ExactField:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive
{
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer fits the field")
    }

    fn floor_value(&self) -> Self;

    fn ceil_value(&self) -> Self;

    /// Smallest positive scalar turning every value into an integer.
    fn denominator_lcm(values: &[Self]) -> Self;
}

macro_rules! ratio_field {
    ($int:ty) => {
        impl ExactField for Ratio<$int> {
            fn floor_value(&self) -> Self {
                self.floor()
            }
            fn ceil_value(&self) -> Self {
                self.ceil()
            }
            fn denominator_lcm(values: &[Self]) -> Self {
                let l = values
                    .iter()
                    .fold(<$int>::one(), |acc, v| acc.lcm(v.denom()));
                Ratio::from_integer(l)
            }
        }
    };
}

ratio_field!(BigInt);
ratio_field!(i64);
ratio_field!(i128);

/// Converts an `f64` literal into the working float type.
#[inline]
pub fn lit<F: Float>(v: f64) -> F {
    F::from(v).expect("literal representable in float type")
}

/// Converts an exact value into a float, saturating to infinities.
pub fn to_float<T: ExactField, F: Float>(v: &T) -> F {
    v.to_f64().and_then(F::from).unwrap_or_else(|| {
        if v.is_negative() {
            F::neg_infinity()
        } else {
            F::infinity()
        }
    })
}

/// Exact conversion of a finite float to a big rational.
pub fn rational_from_f64(v: f64) -> Option<BigRational> {
    BigRational::from_float(v)
}

pub fn rational_from_int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Floating point working type for numerical routines (`f32` or `f64`).
pub trait Real: Float + Send + Sync + Debug + Display + 'static {}

impl<F: Float + Send + Sync + Debug + Display + 'static> Real for F {}
