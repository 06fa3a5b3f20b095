//! Exact rational scalars.
//!
//! Every mass, endpoint, tolerance and distance in this crate is a [`Rat`]:
//! an arbitrary-precision rational kept in lowest terms with a positive
//! denominator. There is no floating point anywhere in a computation path;
//! decimals exist only as display annotations.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An exact rational number. Construction keeps it reduced with a positive
/// denominator, which is all the invariant there is.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

/// Error from parsing a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RatParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer part in rational literal: {0:?}")]
    BadInteger(String),
    #[error("denominator is zero")]
    ZeroDenominator,
}

impl Rat {
    /// `num/den`. Panics if `den == 0`; use [`Rat::parse`] for untrusted input.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Rat(BigRational::new(num, den))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Largest integer `<= self`.
    pub fn floor_int(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Smallest integer `>= self`.
    pub fn ceil_int(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rat(self.0.recip())
    }

    /// Parse `"p/q"` or a bare integer `"p"`. Whitespace around either part
    /// is tolerated.
    pub fn parse(s: &str) -> Result<Self, RatParseError> {
        let s = s.trim();
        if s.is_empty() {
            return Err(RatParseError::Empty);
        }
        let (num_s, den_s) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (s, None),
        };
        let num = BigInt::from_str(num_s)
            .map_err(|_| RatParseError::BadInteger(num_s.to_string()))?;
        let den = match den_s {
            Some(d) => BigInt::from_str(d).map_err(|_| RatParseError::BadInteger(d.to_string()))?,
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(RatParseError::ZeroDenominator);
        }
        Ok(Rat(BigRational::new(num, den)))
    }

    /// Decimal rendering for reports, truncated toward zero at `digits`
    /// fractional places with trailing zeros trimmed. Display-only; never
    /// feeds back into a computation.
    pub fn decimal(&self, digits: u32) -> String {
        let neg = self.0.is_negative();
        let a = self.0.abs();
        let int = a.floor().to_integer();
        let mut frac = &a - BigRational::from_integer(int.clone());
        let mut out = String::new();
        if neg && !self.0.is_zero() {
            out.push('-');
        }
        out.push_str(&int.to_string());
        if frac.is_zero() {
            return out;
        }
        let mut digs = String::new();
        for _ in 0..digits {
            frac *= BigRational::from_integer(BigInt::from(10));
            let d = frac.floor().to_integer();
            digs.push(char::from(b'0' + d.to_u8().unwrap_or(0)));
            frac -= BigRational::from_integer(d);
            if frac.is_zero() {
                break;
            }
        }
        while digs.ends_with('0') {
            digs.pop();
        }
        if digs.is_empty() {
            // value smaller than the rendered precision
            digs.push('0');
        }
        out.push('.');
        out.push_str(&digs);
        if !frac.is_zero() {
            out.push('…');
        }
        out
    }

    pub fn to_f64_lossy(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Rat {
    /// Canonical form is always `p/q`, including `q = 1`, so rationals
    /// round-trip bit-exactly through reports.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for Rat {
    type Err = RatParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rat::parse(s)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(n)
    }
}

impl From<u64> for Rat {
    fn from(n: u64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((self.0).$method(rhs.0))
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Rat::parse(&s).map_err(D::Error::custom)
    }
}

/// `rat!(p / q)` or `rat!(n)` for test and gallery literals.
#[macro_export]
macro_rules! rat {
    ($n:literal / $d:literal) => {
        $crate::rational::Rat::new($n, $d)
    };
    ($n:literal) => {
        $crate::rational::Rat::from_int($n)
    };
}
