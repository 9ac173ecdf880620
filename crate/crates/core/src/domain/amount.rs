//! Exact rational money.
//!
//! Every credit, reward, tax and cost in the crate is an [`Amount`]. There is
//! no floating point anywhere on the money path: incentive inequalities are
//! often tight (exact equality at the boundary) and would flip under rounding.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator. Serialized as `"p/q"`, or `"p"` when integral.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Amount(BigRational);

impl Amount {
    pub fn zero() -> Self {
        Amount(BigRational::zero())
    }

    pub fn one() -> Self {
        Amount(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Amount(BigRational::from_integer(BigInt::from(n)))
    }

    /// Panics on a zero denominator.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Amount(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    /// `2^exp` for any signed exponent.
    pub fn pow2(exp: i32) -> Self {
        let two = BigInt::from(2u8);
        let p = num_traits::pow(two, exp.unsigned_abs() as usize);
        if exp >= 0 {
            Amount(BigRational::from_integer(p))
        } else {
            Amount(BigRational::new(BigInt::one(), p))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Amount(self.0.abs())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    /// Lossy conversion for display and plotting only.
    pub fn to_f64_lossy(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl From<BigRational> for Amount {
    fn from(r: BigRational) -> Self {
        Amount(r)
    }
}

impl From<i64> for Amount {
    fn from(n: i64) -> Self {
        Amount::from_int(n)
    }
}

impl From<u64> for Amount {
    fn from(n: u64) -> Self {
        Amount(BigRational::from_integer(BigInt::from(n)))
    }
}

impl From<u32> for Amount {
    fn from(n: u32) -> Self {
        Amount(BigRational::from_integer(BigInt::from(n)))
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Amount {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::ParseAmount(s.to_string());
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let numer: BigInt = n.parse().map_err(|_| bad())?;
        let denom: BigInt = d.parse().map_err(|_| bad())?;
        if denom.is_zero() {
            return Err(bad());
        }
        Ok(Amount(BigRational::new(numer, denom)))
    }
}

impl Serialize for Amount {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Amount {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        // Integers are accepted as bare JSON numbers too; anything with a
        // fractional part must be a string.
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Str(String),
            Int(i64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(n) => Ok(Amount::from_int(n)),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Amount {
            type Output = Amount;
            fn $method(self, rhs: Amount) -> Amount {
                Amount($trait::$method(self.0, rhs.0))
            }
        }
        impl<'a> $trait<&'a Amount> for Amount {
            type Output = Amount;
            fn $method(self, rhs: &'a Amount) -> Amount {
                Amount($trait::$method(self.0, &rhs.0))
            }
        }
        impl<'a> $trait<&'a Amount> for &'a Amount {
            type Output = Amount;
            fn $method(self, rhs: &'a Amount) -> Amount {
                Amount($trait::$method(&self.0, &rhs.0))
            }
        }
        impl<'a> $trait<Amount> for &'a Amount {
            type Output = Amount;
            fn $method(self, rhs: Amount) -> Amount {
                Amount($trait::$method(&self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Amount> for Amount {
    fn add_assign(&mut self, rhs: &Amount) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Amount {
    fn add_assign(&mut self, rhs: Amount) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Amount> for Amount {
    fn sub_assign(&mut self, rhs: &Amount) {
        self.0 -= &rhs.0;
    }
}

impl SubAssign for Amount {
    fn sub_assign(&mut self, rhs: Amount) {
        self.0 -= rhs.0;
    }
}

impl Neg for Amount {
    type Output = Amount;
    fn neg(self) -> Amount {
        Amount(-self.0)
    }
}

impl Neg for &Amount {
    type Output = Amount;
    fn neg(self) -> Amount {
        Amount(-&self.0)
    }
}

impl Sum for Amount {
    fn sum<I: Iterator<Item = Amount>>(iter: I) -> Amount {
        iter.fold(Amount::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Amount> for Amount {
    fn sum<I: Iterator<Item = &'a Amount>>(iter: I) -> Amount {
        iter.fold(Amount::zero(), |acc, x| acc + x)
    }
}
