//! Dyadic rationals `m * 2^e` with directed rounding to a bit count.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rat::Rat;

/// Rounding direction for a single endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

/// Exact value `mant * 2^exp`. Canonical: `mant` odd, or zero with `exp == 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        if mant.is_zero() {
            return Dyadic::zero();
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            Dyadic { mant, exp }
        } else {
            Dyadic {
                mant: mant >> tz,
                exp: exp + tz as i64,
            }
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic::from_int(BigInt::one())
    }

    pub fn from_int(n: BigInt) -> Self {
        Dyadic::new(n, 0)
    }

    pub fn pow2(e: i64) -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp: e,
        }
    }

    pub fn mant(&self) -> &BigInt {
        &self.mant
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.mant.sign()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    /// Significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// Position of the leading bit: `2^(top-1) <= |x| < 2^top`. Zero maps to `i64::MIN`.
    pub fn top(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exp + self.mant.bits() as i64
        }
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() || other.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
        }
    }

    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    /// Rounds to at most `prec` significant bits in the given direction.
    pub fn round(&self, prec: u32, dir: Round) -> Dyadic {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let shift = bits - prec as u64;
        // `>>` on BigInt rounds toward negative infinity.
        let m = match dir {
            Round::Down => &self.mant >> shift,
            Round::Up => -((-&self.mant) >> shift),
        };
        Dyadic::new(m, self.exp + shift as i64)
    }

    /// `floor` or `ceil` of `num / den * 2^shift`-style quotient, rounded to `prec` bits.
    pub fn div(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        // Scale so the quotient carries at least prec + 2 bits.
        let k = (prec as i64 + 2 + other.mant.bits() as i64 - self.mant.bits() as i64).max(0);
        let num = &self.mant << k as u64;
        let (q, r) = num.div_mod_floor(&other.mant);
        let q = if dir == Round::Up && !r.is_zero() {
            q + 1
        } else {
            q
        };
        Dyadic::new(q, self.exp - other.exp - k).round(prec, dir)
    }

    /// Lower and upper `prec`-bit bounds on `num / den` for `num >= 0`,
    /// `den > 0`. Long operands are truncated to their leading bits first, so
    /// the cost does not grow with their length.
    pub fn ratio_bounds(num: &BigInt, den: &BigInt, prec: u32) -> (Dyadic, Dyadic) {
        debug_assert!(!num.is_negative() && den.is_positive());
        if num.is_zero() {
            return (Dyadic::zero(), Dyadic::zero());
        }
        let keep = prec as u64 + 32;
        let sn = num.bits().saturating_sub(keep);
        let sd = den.bits().saturating_sub(keep);
        if sn == 0 && sd == 0 {
            let (n, d) = (Dyadic::from_int(num.clone()), Dyadic::from_int(den.clone()));
            return (n.div(&d, prec, Round::Down), n.div(&d, prec, Round::Up));
        }
        // num in [n, n + en] 2^sn, den in [d, d + ed] 2^sd
        let (n, d) = (num >> sn, den >> sd);
        let (en, ed) = (u32::from(sn > 0), u32::from(sd > 0));
        let shift = sn as i64 - sd as i64;
        let lo = Dyadic::from_int(n.clone()).div(&Dyadic::from_int(&d + ed), prec, Round::Down);
        let hi = Dyadic::from_int(n + en).div(&Dyadic::from_int(d), prec, Round::Up);
        (lo.mul_pow2(shift), hi.mul_pow2(shift))
    }

    /// Square root of a non-negative value, rounded to `prec` bits.
    pub fn sqrt(&self, prec: u32, dir: Round) -> Dyadic {
        assert!(!self.is_negative(), "sqrt of negative dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        // Make the exponent even and the mantissa wide enough for prec bits of root.
        let mut k = (2 * prec as i64 + 4 - self.mant.bits() as i64).max(0);
        if (self.exp - k).rem_euclid(2) != 0 {
            k += 1;
        }
        let m = &self.mant << k as u64;
        let s = m.sqrt();
        let s = if dir == Round::Up && &s * &s != m {
            s + 1
        } else {
            s
        };
        Dyadic::new(s, (self.exp - k) / 2).round(prec, dir)
    }

    /// Nearest dyadic with `prec` bits on the requested side of a rational.
    pub fn from_rat(r: &Rat, prec: u32, dir: Round) -> Dyadic {
        if r.is_zero() {
            return Dyadic::zero();
        }
        let keep = prec as u64 + 32;
        if r.numer().bits() > keep || r.denom().bits() > keep {
            let neg = r.is_negative();
            let (lo, hi) = Dyadic::ratio_bounds(&r.numer().abs(), r.denom(), prec);
            let v = if (dir == Round::Up) != neg { hi } else { lo };
            return if neg { v.neg() } else { v };
        }
        let n = Dyadic::from_int(r.numer().clone());
        let d = Dyadic::from_int(r.denom().clone());
        if d.mant.is_one() {
            return Dyadic {
                mant: n.mant,
                exp: n.exp - d.exp,
            }
            .round(prec, dir);
        }
        n.div(&d, prec, dir)
    }

    pub fn to_rat(&self) -> Rat {
        if self.exp >= 0 {
            Rat::from_integer(&self.mant << self.exp as u64)
        } else {
            // Canonical mantissas are odd, so the fraction is already reduced.
            Rat::from_coprime(self.mant.clone(), BigInt::one() << self.exp.unsigned_abs())
        }
    }

    /// `floor(self)` as an integer.
    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            &self.mant >> self.exp.unsigned_abs()
        }
    }

    /// `ceil(self)` as an integer.
    pub fn ceil(&self) -> BigInt {
        -(self.neg().floor())
    }

    /// Lossy, for diagnostics.
    pub fn to_f64_lossy(&self) -> f64 {
        self.to_rat().to_f64_lossy()
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.sign(), other.sign());
        if sa != sb {
            let rank = |s: Sign| match s {
                Sign::Minus => 0,
                Sign::NoSign => 1,
                Sign::Plus => 2,
            };
            return rank(sa).cmp(&rank(sb));
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        // Same nonzero sign: leading-bit positions decide unless equal.
        let (ta, tb) = (self.top(), other.top());
        if ta != tb {
            let mag = ta.cmp(&tb);
            return if sa == Sign::Plus { mag } else { mag.reverse() };
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mant.bits() <= 64 {
            write!(f, "{}*2^{}", self.mant, self.exp)
        } else {
            write!(f, "~{:e}", self.to_f64_lossy())
        }
    }
}
