//! The integer scalar every algorithm in this crate is generic over.
//!
//! The crate root fixes it to [`num_bigint::BigInt`]; matrix entries grow
//! exponentially with word length, so fixed-width types are only suitable
//! for small, bounded experiments (the enumeration oracle's differential
//! tests run on `i64`).

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Exact signed integer arithmetic.
pub trait Int:
    Integer + Signed + Clone + Hash + Debug + Display + FromStr + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn from_i64(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("every integer type holds an i64")
    }

    /// `self` divides `n`. Zero divides only zero.
    fn is_divisor_of(&self, n: &Self) -> bool {
        if self.is_zero() {
            n.is_zero()
        } else {
            n.is_multiple_of(self)
        }
    }
}

impl<T> Int for T where
    T: Integer + Signed + Clone + Hash + Debug + Display + FromStr + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

pub(crate) fn int<T: Int>(v: i64) -> T {
    <T as Int>::from_i64(v)
}
