//! Scalar abstraction over the entry type of sparse operators.
//!
//! The algebraic constructions are generic over any signed exact or
//! floating-point scalar; the crate root pins the two concrete choices,
//! [`crate::Rational`] for exact work and `f64` for norm estimation.

use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

pub trait Scalar:
    Clone + PartialEq + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + std::fmt::Debug
{
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer representable in scalar")
    }

    fn as_f64(&self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Scalar for f64 {}
impl Scalar for num::BigRational {}
