//! Gaussian integers `m + i n` with arbitrary-precision components.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A Gaussian integer. Every operation on it is exact.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussianInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        GaussianInt {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn real(re: impl Into<BigInt>) -> Self {
        GaussianInt {
            re: re.into(),
            im: BigInt::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::real(1)
    }

    pub fn i() -> Self {
        Self::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// True for the four units ±1, ±i.
    pub fn is_unit(&self) -> bool {
        self.norm_sqr().is_one()
    }

    pub fn conj(&self) -> Self {
        GaussianInt {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// `|z|² = re² + im²`.
    pub fn norm_sqr(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    /// `i·z`, computed by swapping components.
    pub fn mul_i(&self) -> Self {
        GaussianInt {
            re: -&self.im,
            im: self.re.clone(),
        }
    }

    /// `−i·z`.
    pub fn mul_neg_i(&self) -> Self {
        GaussianInt {
            re: self.im.clone(),
            im: -&self.re,
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        GaussianInt {
            re: &self.re * k,
            im: &self.im * k,
        }
    }

    /// Exact quotient `self / rhs`, or `None` when `rhs` is zero or does
    /// not divide `self` in the Gaussian integers.
    pub fn checked_div(&self, rhs: &GaussianInt) -> Option<GaussianInt> {
        let n = rhs.norm_sqr();
        if n.is_zero() {
            return None;
        }
        let num = self * &rhs.conj();
        let (qr, rr) = num.re.div_rem(&n);
        let (qi, ri) = num.im.div_rem(&n);
        if rr.is_zero() && ri.is_zero() {
            Some(GaussianInt { re: qr, im: qi })
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(big_to_f64(&self.re), big_to_f64(&self.im))
    }
}

pub(crate) fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

impl From<i64> for GaussianInt {
    fn from(re: i64) -> Self {
        GaussianInt::real(re)
    }
}

impl From<(i64, i64)> for GaussianInt {
    fn from((re, im): (i64, i64)) -> Self {
        GaussianInt::new(re, im)
    }
}

impl From<BigInt> for GaussianInt {
    fn from(re: BigInt) -> Self {
        GaussianInt::real(re)
    }
}

impl<'a> Add<&'a GaussianInt> for &'a GaussianInt {
    type Output = GaussianInt;
    fn add(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl<'a> Sub<&'a GaussianInt> for &'a GaussianInt {
    type Output = GaussianInt;
    fn sub(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl<'a> Mul<&'a GaussianInt> for &'a GaussianInt {
    type Output = GaussianInt;
    fn mul(self, rhs: &GaussianInt) -> GaussianInt {
        // Pure-real operands are the common case (integer Hamiltonians).
        if rhs.im.is_zero() {
            return self.scale(&rhs.re);
        }
        if self.im.is_zero() {
            return rhs.scale(&self.re);
        }
        GaussianInt {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        GaussianInt {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

impl Neg for GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        GaussianInt {
            re: -self.re,
            im: -self.im,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<GaussianInt> for GaussianInt {
            type Output = GaussianInt;
            fn $f(self, rhs: GaussianInt) -> GaussianInt {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a GaussianInt> for GaussianInt {
            type Output = GaussianInt;
            fn $f(self, rhs: &GaussianInt) -> GaussianInt {
                (&self).$f(rhs)
            }
        }
        impl<'a> $tr<GaussianInt> for &'a GaussianInt {
            type Output = GaussianInt;
            fn $f(self, rhs: GaussianInt) -> GaussianInt {
                self.$f(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&GaussianInt> for GaussianInt {
    fn add_assign(&mut self, rhs: &GaussianInt) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl AddAssign<GaussianInt> for GaussianInt {
    fn add_assign(&mut self, rhs: GaussianInt) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl SubAssign<&GaussianInt> for GaussianInt {
    fn sub_assign(&mut self, rhs: &GaussianInt) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl std::iter::Sum for GaussianInt {
    fn sum<I: Iterator<Item = GaussianInt>>(iter: I) -> Self {
        iter.fold(GaussianInt::zero(), |mut acc, z| {
            acc += z;
            acc
        })
    }
}

/// Serialized as `a+bi` / `a-bi` with decimal components, e.g. `1-1i`, `0+0i`.
impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -&self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl fmt::Debug for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for GaussianInt {
    type Err = Error;

    /// Accepts the canonical `a±bi` form. A bare integer `a` is also taken
    /// as `a+0i`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a Gaussian integer: {s:?}"));
        let Some(body) = s.strip_suffix('i') else {
            return BigInt::from_str(s).map(GaussianInt::real).map_err(|_| bad());
        };
        // The separating sign is the last '+' or '-' that is not the leading sign.
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last()
            .ok_or_else(bad)?;
        let (re, im) = body.split_at(split);
        let im = im.strip_prefix('+').unwrap_or(im);
        if im.is_empty() || im == "-" {
            return Err(bad());
        }
        Ok(GaussianInt {
            re: BigInt::from_str(re).map_err(|_| bad())?,
            im: BigInt::from_str(im).map_err(|_| bad())?,
        })
    }
}

impl Serialize for GaussianInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GaussianInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
