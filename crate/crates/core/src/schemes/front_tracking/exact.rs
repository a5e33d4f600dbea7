//! Number types for front positions and speeds.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{NumCast, One, ToPrimitive, Zero};

use crate::scalar::Scalar;

/// Ordered field used by the scalar front-tracking engine.
pub trait FrontNumber:
    Clone
    + PartialOrd
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(k: i64) -> Self;
    /// Conversion from a float, `None` for non-finite input.
    fn from_f64(x: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
    /// Largest integer `≤ self`.
    fn floor_i64(&self) -> i64;
    /// Whether ties must be resolved by exact comparison.
    const EXACT: bool;
}

impl<T: Scalar> FrontNumber for T {
    const EXACT: bool = false;
    fn zero() -> Self {
        <T as Zero>::zero()
    }
    fn one() -> Self {
        <T as One>::one()
    }
    fn from_i64(k: i64) -> Self {
        <T as NumCast>::from(k).expect("integer representable")
    }
    fn from_f64(x: f64) -> Option<Self> {
        if x.is_finite() {
            <T as NumCast>::from(x)
        } else {
            None
        }
    }
    fn to_f64(&self) -> f64 {
        self.to_f64_lossy()
    }
    fn floor_i64(&self) -> i64 {
        ToPrimitive::to_i64(&self.floor()).unwrap_or(i64::MIN)
    }
}

impl FrontNumber for BigRational {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(k: i64) -> Self {
        BigRational::from_integer(BigInt::from(k))
    }
    /// Reads the shortest decimal representation of `x`, so `0.05` becomes `1/20`.
    fn from_f64(x: f64) -> Option<Self> {
        decimal_rational(x)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn floor_i64(&self) -> i64 {
        self.floor().to_integer().to_i64().unwrap_or(i64::MIN)
    }
}

/// Exact rational with the same shortest decimal expansion as `x`.
pub fn decimal_rational(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let s = format!("{x:e}");
    let (mant, exp) = s.split_once('e')?;
    let exp: i64 = exp.parse().ok()?;
    let neg = mant.starts_with('-');
    let mant = mant.trim_start_matches('-');
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let shift = exp - frac.len() as i64;
    let ten = BigInt::from(10);
    let mut r = if shift >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-shift) as usize))
    };
    if neg {
        r = -r;
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_are_exact() {
        let r = decimal_rational(0.05).unwrap();
        assert_eq!(r, BigRational::new(BigInt::from(1), BigInt::from(20)));
        assert_eq!(decimal_rational(-1.5).unwrap(), BigRational::new(BigInt::from(-3), BigInt::from(2)));
        assert_eq!(decimal_rational(1200.0).unwrap(), BigRational::from_integer(BigInt::from(1200)));
        assert_eq!(decimal_rational(0.0).unwrap(), <BigRational as Zero>::zero());
        assert!(decimal_rational(f64::NAN).is_none());
    }
}
