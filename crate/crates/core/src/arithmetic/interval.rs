//! Outward-rounded real and complex intervals with dyadic endpoints.

use std::fmt;

use num_bigint::BigInt;

use super::dyadic::{Dyadic, Round};
use super::rat::Rat;
use crate::error::{Error, Result};

/// A closed interval `[lower, upper]` of reals; every operation returns an
/// enclosure of the exact result, rounded outward to `precision` bits.
#[derive(Clone, PartialEq, Eq)]
pub struct IntervalReal {
    lower: Dyadic,
    upper: Dyadic,
    precision: u32,
}

impl IntervalReal {
    /// Builds from endpoints; panics if `lower > upper`.
    pub fn new(lower: Dyadic, upper: Dyadic, precision: u32) -> Self {
        assert!(lower <= upper, "inverted interval {lower:?} > {upper:?}");
        IntervalReal {
            lower: lower.round(precision, Round::Down),
            upper: upper.round(precision, Round::Up),
            precision,
        }
    }

    pub fn point(d: Dyadic, precision: u32) -> Self {
        IntervalReal::new(d.clone(), d, precision)
    }

    pub fn zero(precision: u32) -> Self {
        IntervalReal::point(Dyadic::zero(), precision)
    }

    pub fn one(precision: u32) -> Self {
        IntervalReal::point(Dyadic::one(), precision)
    }

    pub fn from_int(n: &BigInt, precision: u32) -> Self {
        IntervalReal::point(Dyadic::from_int(n.clone()), precision)
    }

    pub fn from_rat(r: &Rat, precision: u32) -> Self {
        IntervalReal {
            lower: Dyadic::from_rat(r, precision, Round::Down),
            upper: Dyadic::from_rat(r, precision, Round::Up),
            precision,
        }
    }

    pub fn lower(&self) -> &Dyadic {
        &self.lower
    }

    pub fn upper(&self) -> &Dyadic {
        &self.upper
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn with_precision(&self, precision: u32) -> Self {
        IntervalReal::new(self.lower.clone(), self.upper.clone(), precision)
    }

    pub fn width(&self) -> Dyadic {
        self.upper.sub(&self.lower)
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }

    /// Midpoint as an exact rational.
    pub fn mid(&self) -> Rat {
        self.lower.add(&self.upper).mul_pow2(-1).to_rat()
    }

    pub fn contains_rat(&self, r: &Rat) -> bool {
        self.lower.to_rat() <= *r && *r <= self.upper.to_rat()
    }

    pub fn contains(&self, other: &IntervalReal) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }

    pub fn intersects(&self, other: &IntervalReal) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }

    pub fn hull(&self, other: &IntervalReal) -> IntervalReal {
        IntervalReal::new(
            self.lower.clone().min(other.lower.clone()),
            self.upper.clone().max(other.upper.clone()),
            self.precision.max(other.precision),
        )
    }

    /// Certainly `> 0`.
    pub fn is_positive(&self) -> bool {
        self.lower > Dyadic::zero()
    }

    /// Certainly `< 0`.
    pub fn is_negative(&self) -> bool {
        self.upper < Dyadic::zero()
    }

    pub fn contains_zero(&self) -> bool {
        self.lower <= Dyadic::zero() && Dyadic::zero() <= self.upper
    }

    fn prec2(&self, other: &IntervalReal) -> u32 {
        self.precision.max(other.precision)
    }

    pub fn add(&self, other: &IntervalReal) -> IntervalReal {
        IntervalReal::new(
            self.lower.add(&other.lower),
            self.upper.add(&other.upper),
            self.prec2(other),
        )
    }

    pub fn sub(&self, other: &IntervalReal) -> IntervalReal {
        IntervalReal::new(
            self.lower.sub(&other.upper),
            self.upper.sub(&other.lower),
            self.prec2(other),
        )
    }

    pub fn neg(&self) -> IntervalReal {
        IntervalReal {
            lower: self.upper.neg(),
            upper: self.lower.neg(),
            precision: self.precision,
        }
    }

    pub fn mul(&self, other: &IntervalReal) -> IntervalReal {
        let prec = self.prec2(other);
        let zero = Dyadic::zero();
        let (a, b, c, d) = (&self.lower, &self.upper, &other.lower, &other.upper);
        // Sign-case dispatch keeps the common positive case to two products.
        if *a >= zero && *c >= zero {
            return IntervalReal::new(a.mul(c), b.mul(d), prec);
        }
        if *b <= zero && *d <= zero {
            return IntervalReal::new(b.mul(d), a.mul(c), prec);
        }
        let products = [a.mul(c), a.mul(d), b.mul(c), b.mul(d)];
        let lo = products.iter().min().expect("four products").clone();
        let hi = products.iter().max().expect("four products").clone();
        IntervalReal::new(lo, hi, prec)
    }

    pub fn mul_rat(&self, r: &Rat) -> IntervalReal {
        self.mul(&IntervalReal::from_rat(r, self.precision))
    }

    pub fn mul_pow2(&self, k: i64) -> IntervalReal {
        IntervalReal {
            lower: self.lower.mul_pow2(k),
            upper: self.upper.mul_pow2(k),
            precision: self.precision,
        }
    }

    pub fn square(&self) -> IntervalReal {
        let a = self.abs();
        a.mul(&a)
    }

    pub fn recip(&self) -> Result<IntervalReal> {
        IntervalReal::one(self.precision).div(self)
    }

    /// Division by an interval that excludes zero.
    pub fn div(&self, other: &IntervalReal) -> Result<IntervalReal> {
        if other.contains_zero() {
            return Err(Error::domain(
                "interval division by an interval containing zero",
            ));
        }
        let prec = self.prec2(other);
        let (a, b, c, d) = (&self.lower, &self.upper, &other.lower, &other.upper);
        let cands_lo = [
            a.div(c, prec, Round::Down),
            a.div(d, prec, Round::Down),
            b.div(c, prec, Round::Down),
            b.div(d, prec, Round::Down),
        ];
        let cands_hi = [
            a.div(c, prec, Round::Up),
            a.div(d, prec, Round::Up),
            b.div(c, prec, Round::Up),
            b.div(d, prec, Round::Up),
        ];
        let lo = cands_lo.iter().min().expect("four quotients").clone();
        let hi = cands_hi.iter().max().expect("four quotients").clone();
        Ok(IntervalReal::new(lo, hi, prec))
    }

    pub fn abs(&self) -> IntervalReal {
        let zero = Dyadic::zero();
        if self.lower >= zero {
            self.clone()
        } else if self.upper <= zero {
            self.neg()
        } else {
            let hi = self.lower.abs().max(self.upper.clone());
            IntervalReal::new(zero, hi, self.precision)
        }
    }

    pub fn sqrt(&self) -> Result<IntervalReal> {
        if self.upper.is_negative() {
            return Err(Error::domain("sqrt of a negative interval"));
        }
        let lo = if self.lower.is_negative() {
            Dyadic::zero()
        } else {
            self.lower.sqrt(self.precision, Round::Down)
        };
        let hi = self.upper.sqrt(self.precision, Round::Up);
        Ok(IntervalReal::new(lo, hi, self.precision))
    }

    pub fn max(&self, other: &IntervalReal) -> IntervalReal {
        IntervalReal::new(
            self.lower.clone().max(other.lower.clone()),
            self.upper.clone().max(other.upper.clone()),
            self.prec2(other),
        )
    }

    pub fn min(&self, other: &IntervalReal) -> IntervalReal {
        IntervalReal::new(
            self.lower.clone().min(other.lower.clone()),
            self.upper.clone().min(other.upper.clone()),
            self.prec2(other),
        )
    }

    /// Smallest interval with integer shift removed so that `lower ∈ [0, 1)`.
    pub fn reduce_mod_one(&self) -> IntervalReal {
        let k = self.lower.floor();
        let shift = Dyadic::from_int(-k);
        IntervalReal::new(
            self.lower.add(&shift),
            self.upper.add(&shift),
            self.precision,
        )
    }

    /// Lossy midpoint, for diagnostics only.
    pub fn to_f64_lossy(&self) -> f64 {
        self.mid().to_f64_lossy()
    }
}

impl fmt::Debug for IntervalReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:e}, {:e}]@{}",
            self.lower.to_f64_lossy(),
            self.upper.to_f64_lossy(),
            self.precision
        )
    }
}

/// Rectangular enclosure of a complex number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexInterval {
    pub re: IntervalReal,
    pub im: IntervalReal,
}

impl ComplexInterval {
    pub fn new(re: IntervalReal, im: IntervalReal) -> Self {
        ComplexInterval { re, im }
    }

    pub fn real(re: IntervalReal) -> Self {
        let p = re.precision();
        ComplexInterval {
            re,
            im: IntervalReal::zero(p),
        }
    }

    pub fn zero(precision: u32) -> Self {
        ComplexInterval::real(IntervalReal::zero(precision))
    }

    pub fn add(&self, other: &ComplexInterval) -> ComplexInterval {
        ComplexInterval::new(self.re.add(&other.re), self.im.add(&other.im))
    }

    pub fn sub(&self, other: &ComplexInterval) -> ComplexInterval {
        ComplexInterval::new(self.re.sub(&other.re), self.im.sub(&other.im))
    }

    pub fn mul(&self, other: &ComplexInterval) -> ComplexInterval {
        let re = self.re.mul(&other.re).sub(&self.im.mul(&other.im));
        let im = self.re.mul(&other.im).add(&self.im.mul(&other.re));
        ComplexInterval::new(re, im)
    }

    pub fn scale(&self, k: &IntervalReal) -> ComplexInterval {
        ComplexInterval::new(self.re.mul(k), self.im.mul(k))
    }

    /// Enclosure of the modulus.
    pub fn abs(&self) -> IntervalReal {
        if self.im.is_point() && self.im.lower().is_zero() {
            return self.re.abs();
        }
        if self.re.is_point() && self.re.lower().is_zero() {
            return self.im.abs();
        }
        self.re
            .square()
            .add(&self.im.square())
            .sqrt()
            .expect("sum of squares is non-negative")
    }

    pub fn intersects(&self, other: &ComplexInterval) -> bool {
        self.re.intersects(&other.re) && self.im.intersects(&other.im)
    }

    pub fn contains(&self, other: &ComplexInterval) -> bool {
        self.re.contains(&other.re) && self.im.contains(&other.im)
    }
}
