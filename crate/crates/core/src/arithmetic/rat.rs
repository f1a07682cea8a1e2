//! Exact rationals over arbitrary-precision integers.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::gcd::gcd;
use crate::error::{Error, Result};

/// An exact rational number, always in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(numer: BigInt, denom: BigInt) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::domain("zero denominator"));
        }
        Ok(Rat::reduced(numer, denom))
    }

    /// Lowest terms via the fast gcd; `denom` must be nonzero.
    fn reduced(numer: BigInt, denom: BigInt) -> Rat {
        let (numer, denom) = if denom.is_negative() {
            (-numer, -denom)
        } else {
            (numer, denom)
        };
        if numer.is_zero() {
            return Rat::zero();
        }
        let g = gcd(&numer, &denom);
        if g.is_one() {
            Rat(BigRational::new_raw(numer, denom))
        } else {
            Rat(BigRational::new_raw(numer / &g, denom / &g))
        }
    }

    pub fn from_integer(n: BigInt) -> Self {
        Rat(BigRational::from_integer(n))
    }

    pub fn from_uint(n: &BigUint) -> Self {
        Rat::from_integer(BigInt::from(n.clone()))
    }

    pub fn from_i64(n: i64) -> Self {
        Rat::from_integer(BigInt::from(n))
    }

    /// `n / d` for small integers; panics on `d == 0`.
    pub fn ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Rat::reduced(BigInt::from(n), BigInt::from(d))
    }

    /// `2^e` for any signed exponent.
    pub fn pow2(e: i64) -> Self {
        if e >= 0 {
            Rat::from_integer(BigInt::one() << e as u64)
        } else {
            Rat(BigRational::new_raw(
                BigInt::one(),
                BigInt::one() << e.unsigned_abs(),
            ))
        }
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Result<Rat> {
        if self.is_zero() {
            return Err(Error::domain("reciprocal of zero"));
        }
        let (n, d) = (self.numer().clone(), self.denom().clone());
        Ok(if n.is_negative() {
            Rat(BigRational::new_raw(-d, -n))
        } else {
            Rat(BigRational::new_raw(d, n))
        })
    }

    pub fn checked_div(&self, other: &Rat) -> Result<Rat> {
        if other.is_zero() {
            return Err(Error::domain("division by zero"));
        }
        Ok(self * &other.recip()?)
    }

    /// Largest integer not above `self`.
    pub fn floor(&self) -> BigInt {
        self.numer().div_floor(self.denom())
    }

    /// Smallest integer not below `self`.
    pub fn ceil(&self) -> BigInt {
        -((-self.numer()).div_floor(self.denom()))
    }

    /// `self - floor(self)`, in `[0, 1)`.
    pub fn frac(&self) -> Rat {
        let r = self.numer().mod_floor(self.denom());
        Rat(BigRational::new_raw(r, self.denom().clone()))
    }

    /// `self` reduced into `[0, m)` for a positive integer modulus.
    pub fn rem_euclid_int(&self, m: u32) -> Rat {
        let md = self.denom() * BigInt::from(m);
        let r = self.numer().mod_floor(&md);
        // r ≡ numer (mod denom), so it stays coprime to denom.
        Rat(BigRational::new_raw(r, self.denom().clone()))
    }

    /// Wraps a pair already in lowest terms with positive denominator.
    pub(crate) fn from_coprime(numer: BigInt, denom: BigInt) -> Rat {
        debug_assert!(denom.is_positive());
        Rat(BigRational::new_raw(numer, denom))
    }

    pub fn pow(&self, e: u32) -> Rat {
        let n = num_traits::pow(self.numer().clone(), e as usize);
        let d = num_traits::pow(self.denom().clone(), e as usize);
        Rat(BigRational::new_raw(n, d))
    }

    /// Total bit size of numerator and denominator; a proxy for the precision
    /// needed to represent the value exactly.
    pub fn bit_size(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }

    /// If the value is `2^e` for some integer `e`, returns `e`.
    pub fn as_pow2(&self) -> Option<i64> {
        let n = self.numer();
        let d = self.denom();
        if n.sign() != Sign::Plus {
            return None;
        }
        let is_pow2 = |x: &BigInt| x.trailing_zeros() == Some(x.bits() - 1);
        if d.is_one() && is_pow2(n) {
            return Some((n.bits() - 1) as i64);
        }
        if n.is_one() && is_pow2(d) {
            return Some(-((d.bits() - 1) as i64));
        }
        None
    }

    /// Non-negative integer value, if `self` is one.
    pub fn to_biguint(&self) -> Option<BigUint> {
        if self.is_integer() && !self.is_negative() {
            self.numer().to_biguint()
        } else {
            None
        }
    }

    /// Lossy conversion for diagnostics and search heuristics only.
    pub fn to_f64_lossy(&self) -> f64 {
        let nb = self.numer().bits() as i64;
        let db = self.denom().bits() as i64;
        let shift_n = (nb - 60).max(0);
        let shift_d = (db - 60).max(0);
        let n = (self.numer() >> shift_n as u64)
            .to_string()
            .parse::<f64>()
            .unwrap_or(0.0);
        let d = (self.denom() >> shift_d as u64)
            .to_string()
            .parse::<f64>()
            .unwrap_or(1.0);
        let e = (shift_n - shift_d) as i32;
        if e > 1023 {
            return if n < 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            };
        }
        if e < -1074 {
            return 0.0;
        }
        n / d * 2f64.powi(e)
    }

    /// Approximate `log2(|self|)` for sizing decisions; not certified.
    pub fn log2_estimate(&self) -> f64 {
        fn log2_int(x: &BigInt) -> f64 {
            let b = x.bits();
            if b <= 60 {
                return (x.abs().to_string().parse::<f64>().unwrap_or(1.0)).log2();
            }
            let top = (x.abs() >> (b - 60))
                .to_string()
                .parse::<f64>()
                .unwrap_or(1.0);
            top.log2() + (b - 60) as f64
        }
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        log2_int(self.numer()) - log2_int(self.denom())
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom().is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bit_size() > 256 {
            write!(f, "Rat(~2^{:.1})", self.log2_estimate())
        } else {
            write!(f, "Rat({})", self)
        }
    }
}

impl FromStr for Rat {
    type Err = Error;

    /// Accepts `a`, `a/b`, decimal `1.25`, scientific `1.5e-3`, and `2^-e`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::parse("empty number"));
        }
        if let Some(exp) = s.strip_prefix("2^") {
            let e: i64 = exp
                .parse()
                .map_err(|_| Error::parse(format!("bad power of two `{s}`")))?;
            return Ok(Rat::pow2(e));
        }
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n
                .trim()
                .parse()
                .map_err(|_| Error::parse(format!("bad numerator in `{s}`")))?;
            let d: BigInt = d
                .trim()
                .parse()
                .map_err(|_| Error::parse(format!("bad denominator in `{s}`")))?;
            return Rat::new(n, d);
        }
        parse_decimal(s)
    }
}

fn parse_decimal(s: &str) -> Result<Rat> {
    let bad = || Error::parse(format!("bad number `{s}`"));
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut n: BigInt = if all.is_empty() {
        BigInt::zero()
    } else {
        all.parse().map_err(|_| bad())?
    };
    if neg {
        n = -n;
    }
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    if scale >= 0 {
        Ok(Rat::from_integer(n * num_traits::pow(ten, scale as usize)))
    } else {
        Rat::new(n, num_traits::pow(ten, scale.unsigned_abs() as usize))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// Knuth's gcd-splitting formulas keep operands small; `BigRational`'s own
// operators reduce the full products through the slow binary gcd.
fn add_impl(x: &Rat, y: &Rat) -> Rat {
    if x.is_zero() {
        return y.clone();
    }
    if y.is_zero() {
        return x.clone();
    }
    let (a, b, c, d) = (x.numer(), x.denom(), y.numer(), y.denom());
    if b.is_one() && d.is_one() {
        return Rat::from_integer(a + c);
    }
    let g = gcd(b, d);
    if g.is_one() {
        return Rat::from_coprime(a * d + c * b, b * d);
    }
    let (bg, dg) = (b / &g, d / &g);
    let t = a * &dg + c * &bg;
    if t.is_zero() {
        return Rat::zero();
    }
    let g2 = gcd(&t, &g);
    if g2.is_one() {
        Rat::from_coprime(t, bg * d)
    } else {
        Rat::from_coprime(t / &g2, bg * (d / &g2))
    }
}

fn mul_impl(x: &Rat, y: &Rat) -> Rat {
    if x.is_zero() || y.is_zero() {
        return Rat::zero();
    }
    let (a, b, c, d) = (x.numer(), x.denom(), y.numer(), y.denom());
    let g1 = gcd(a, d);
    let g2 = gcd(c, b);
    let split = |n: &BigInt, g: &BigInt| if g.is_one() { n.clone() } else { n / g };
    Rat::from_coprime(split(a, &g1) * split(c, &g2), split(b, &g2) * split(d, &g1))
}

fn sub_impl(x: &Rat, y: &Rat) -> Rat {
    add_impl(x, &-y)
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                $imp(self, rhs)
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                $imp(&self, &rhs)
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                $imp(&self, rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_impl);
forward_binop!(Sub, sub, sub_impl);
forward_binop!(Mul, mul, mul_impl);

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.numer().sign(), other.numer().sign());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if self.denom() == other.denom() {
            return self.numer().cmp(other.numer());
        }
        (self.numer() * other.denom()).cmp(&(other.numer() * self.denom()))
    }
}

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

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_i64(n)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Self {
        Rat::from_integer(n)
    }
}

impl From<&BigUint> for Rat {
    fn from(n: &BigUint) -> Self {
        Rat::from_uint(n)
    }
}

/// Fractional part `{x}`.
pub fn frac(x: &Rat) -> Rat {
    x.frac()
}

/// `ceil(log2(k))` for `k >= 1`, exact.
pub fn ceil_log2(k: &BigUint) -> u64 {
    assert!(!k.is_zero(), "ceil_log2 of zero");
    (k - 1u32).bits()
}

/// Compares `a/b` with `c/d` without building rationals.
pub fn cmp_fractions(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> Ordering {
    (a * d).cmp(&(c * b))
}
