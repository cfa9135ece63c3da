//! The coefficient field.
//!
//! Every algorithm in the crate is written against [`Scalar`], which is
//! satisfied by any `num-traits` field-like type. Exact answers need an exact
//! field; the crate root fixes [`crate::Rational`] (arbitrary precision) for
//! that purpose. Floating-point types satisfy the bound and are fine for
//! evaluating forms, but zero tests inside elimination are then only as good
//! as the rounding.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_traits::{FromPrimitive, Num};

pub trait Scalar:
    Num + Neg<Output = Self> + FromPrimitive + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer fits the scalar type")
    }

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }
}

impl<T> Scalar for T where
    T: Num + Neg<Output = T> + FromPrimitive + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
}
