//! Certified enclosures of `exp`, `ln`, `log2`, `sin(pi x)`, `cos(pi x)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::dyadic::{Dyadic, Round};
use super::interval::IntervalReal;
use super::kernels::{exp_small, ln2_fixed, pi_fixed, sin_cos_small};
use super::rat::Rat;
use crate::error::{Error, Result};

const GUARD: u32 = 16;

/// Enclosure of `pi`.
pub fn pi(prec: u32) -> IntervalReal {
    pi_fixed(prec + GUARD).to_interval(prec)
}

/// Enclosure of `ln 2`.
pub fn ln2(prec: u32) -> IntervalReal {
    ln2_fixed(prec + GUARD).to_interval(prec)
}

fn dyadic_from_f64(x: f64) -> Dyadic {
    assert!(x.is_finite());
    if x == 0.0 {
        return Dyadic::zero();
    }
    let e = x.abs().log2().floor() as i64;
    let m = (x * 2f64.powi((60 - e) as i32)).round() as i64;
    Dyadic::new(BigInt::from(m), e - 60)
}

/// `(k, t)` with `x = k ln2 + t`, `t` enclosed by `[t_lo, t_hi]` and `|t| < 0.36`.
fn reduce_ln2(x: &Dyadic, bits: u32) -> Result<(i64, Dyadic, Dyadic)> {
    let xf = x.to_f64_lossy();
    if !xf.is_finite() || xf.abs() > 2f64.powi(52) {
        return Err(Error::SizeLimit(format!(
            "exp argument of magnitude ~2^{} is outside the supported range",
            x.top()
        )));
    }
    let k = (xf / std::f64::consts::LN_2).round() as i64;
    if k == 0 {
        return Ok((0, x.clone(), x.clone()));
    }
    let kb = 64 - k.unsigned_abs().leading_zeros();
    let l = ln2_fixed(bits + kb + GUARD);
    let kd = Dyadic::from_int(BigInt::from(k));
    let (l_small, l_big) = if k > 0 {
        (l.lower(), l.upper())
    } else {
        (l.upper(), l.lower())
    };
    let t_lo = x.sub(&kd.mul(&l_big)).round(bits + GUARD, Round::Down);
    let t_hi = x.sub(&kd.mul(&l_small)).round(bits + GUARD, Round::Up);
    Ok((k, t_lo, t_hi))
}

/// Enclosure of `exp(x)` for an interval argument. Fails only when the
/// result's binary exponent would not fit a machine integer.
pub fn exp(x: &IntervalReal, prec: u32) -> Result<IntervalReal> {
    if x.is_point() && x.lower().is_zero() {
        return Ok(IntervalReal::one(prec));
    }
    let (k_lo, t_lo, _) = reduce_ln2(x.lower(), prec)?;
    let base = exp_small(&t_lo, prec + GUARD);
    let lo = base.lower().mul_pow2(k_lo);
    let (k_hi, _, t_hi) = reduce_ln2(x.upper(), prec)?;
    let hi = if k_hi == k_lo && x.width().top() < -(prec as i64) {
        // exp(b) <= exp(a) (1 + 2 (b - a)) once b - a <= 1.
        let up = base.upper();
        let span = t_hi.sub(&t_lo);
        up.add(&up.mul(&span).mul_pow2(1)).mul_pow2(k_hi)
    } else {
        exp_small(&t_hi, prec + GUARD).upper().mul_pow2(k_hi)
    };
    Ok(IntervalReal::new(lo, hi, prec))
}

pub fn exp_rat(x: &Rat, prec: u32) -> Result<IntervalReal> {
    let bits = prec + x.numer().bits().min(1 << 20) as u32 + GUARD;
    exp(&IntervalReal::from_rat(x, bits), prec)
}

/// Enclosure of `e^x` for `x <= 0`, used to certify the decay condition.
pub fn exp_upper(x: &Rat, prec: u32) -> Result<IntervalReal> {
    if x.is_positive() {
        return Err(Error::domain("exp_upper requires x <= 0"));
    }
    exp_rat(x, prec)
}

/// Smallest integer `e` with `2^-e < exp(-q)`, i.e. `e ln 2 > q`, certified
/// exactly against an interval for `ln 2`.
pub fn decay_exponent(q: &BigInt) -> Result<BigInt> {
    if q.is_negative() {
        return Err(Error::domain("decay exponent of a negative frequency"));
    }
    let mut bits = q.bits() as u32 + 64;
    loop {
        let l = ln2_fixed(bits);
        let qd = Dyadic::from_int(q.clone());
        // q / ln2 lies in [q / l_hi, q / l_lo].
        let lo = qd.div(&l.upper(), bits, Round::Down).floor();
        let hi = qd.div(&l.lower(), bits, Round::Up).floor();
        if lo == hi {
            let e: BigInt = lo + 1;
            let check = Dyadic::from_int(e.clone()).mul(&l.lower());
            if check > qd {
                return Ok(e);
            }
        }
        bits *= 2;
        if bits > (q.bits() as u32).saturating_mul(4) + 4096 {
            return Err(Error::Indeterminate {
                what: "decay exponent".into(),
                precision: bits,
            });
        }
    }
}

/// Enclosure `[lo, hi]` of `ln m` for `2/3 <= m < 4/3`, about `bits` bits absolute.
fn ln_near_one(m: &Dyadic, bits: u32) -> (Dyadic, Dyadic) {
    if *m == Dyadic::one() {
        return (Dyadic::zero(), Dyadic::zero());
    }
    let mut levels = Vec::new();
    let mut p = bits + GUARD;
    while p > 48 {
        levels.push(p);
        p = p / 2 + 8;
    }
    levels.reverse();
    let mut y = dyadic_from_f64(m.to_f64_lossy().ln());
    let last = levels.len().saturating_sub(1);
    for (i, &p) in levels.iter().enumerate() {
        let e = exp_small(&y, p);
        if i == last {
            // ln m = y + ln(m/E), and 1 - 1/u <= ln u <= u - 1.
            let lo = y
                .add(&Dyadic::one())
                .sub(&e.upper().div(m, p, Round::Up))
                .round(p, Round::Down);
            let hi = y
                .add(&m.div(&e.lower(), p, Round::Up))
                .sub(&Dyadic::one())
                .round(p, Round::Up);
            return (lo, hi);
        }
        let mid = Dyadic::new(e.value.clone(), -(e.scale as i64));
        y = y
            .add(&m.div(&mid, p, Round::Down))
            .sub(&Dyadic::one())
            .round(p + 8, Round::Down);
    }
    // bits + GUARD <= 48: a single certified step from the float seed.
    let e = exp_small(&y, 64);
    let lo = y.add(&Dyadic::one()).sub(&e.upper().div(m, 64, Round::Up));
    let hi = y.add(&m.div(&e.lower(), 64, Round::Up)).sub(&Dyadic::one());
    (lo, hi)
}

/// `ln x` for an exact positive dyadic, absolute error about `2^-prec * max(1, |ln x|)`.
fn ln_point(x: &Dyadic, prec: u32) -> Result<(Dyadic, Dyadic)> {
    if x.is_negative() || x.is_zero() {
        return Err(Error::domain("ln of a non-positive number"));
    }
    let mut e = x.top() - 1;
    let mut m = x.mul_pow2(-e);
    // Move m into [2/3, 4/3).
    if m.mul(&Dyadic::from_int(BigInt::from(3))) >= Dyadic::from_int(BigInt::from(4)) {
        e += 1;
        m = m.mul_pow2(-1);
    }
    let eb = 64 - e.unsigned_abs().leading_zeros();
    let bits = prec + eb + GUARD;
    // Round huge mantissas first; ln is monotone so the rounding is one more bracket.
    let (m_lo, m_hi) = if m.bits() > (bits + 2 * GUARD) as u64 {
        (
            m.round(bits + 2 * GUARD, Round::Down),
            m.round(bits + 2 * GUARD, Round::Up),
        )
    } else {
        (m.clone(), m.clone())
    };
    let (mut lo, mut hi) = ln_near_one(&m_lo, bits);
    if m_lo != m_hi {
        // ln(b) <= ln(a) + (b - a)/a.
        hi = hi.add(&m_hi.sub(&m_lo).div(&m_lo, 32, Round::Up));
    }
    if e != 0 {
        let l = ln2_fixed(bits);
        let ed = Dyadic::from_int(BigInt::from(e));
        let (l_lo, l_hi) = if e > 0 {
            (l.lower(), l.upper())
        } else {
            (l.upper(), l.lower())
        };
        lo = lo.add(&ed.mul(&l_lo));
        hi = hi.add(&ed.mul(&l_hi));
    }
    Ok((lo, hi))
}

/// Enclosure of `ln x`; the interval must be strictly positive.
pub fn ln(x: &IntervalReal, prec: u32) -> Result<IntervalReal> {
    if !x.is_positive() {
        return Err(Error::domain("ln of an interval reaching zero or below"));
    }
    let (lo, mut hi) = ln_point(x.lower(), prec)?;
    if !x.is_point() {
        let w = x.width().div(x.lower(), 32, Round::Up);
        if w.top() < -(prec as i64) - 8 {
            hi = hi.add(&w);
        } else {
            hi = ln_point(x.upper(), prec)?.1;
        }
    }
    Ok(IntervalReal::new(lo, hi, prec))
}

pub fn ln_int(n: &BigInt, prec: u32) -> Result<IntervalReal> {
    ln(&IntervalReal::from_int(n, (n.bits() as u32).max(1)), prec)
}

/// Enclosure of `log2 x`.
pub fn log2(x: &IntervalReal, prec: u32) -> Result<IntervalReal> {
    if x.is_point() {
        if let Some(e) = x.lower().mant().is_one().then(|| x.lower().exp()) {
            return Ok(IntervalReal::point(Dyadic::from_int(BigInt::from(e)), prec));
        }
    }
    let l = ln(x, prec + 4)?;
    l.div(&ln2(prec + 4)).map(|v| v.with_precision(prec))
}

/// Which of the quarter-turn pieces a reduced angle maps to.
struct Reduced {
    /// Angle `w_num / w_den` in `[0, 1/4]`, in units of `pi`.
    w_num: BigInt,
    w_den: BigInt,
    /// `sin(pi theta) = s_sign * (swap ? cos : sin)(pi w)`, and symmetrically for cos.
    swap: bool,
    s_neg: bool,
    c_neg: bool,
}

/// Exact reduction in integers; no gcds, so enormous numerators stay cheap.
fn reduce_pi(num: &BigInt, den: &BigInt) -> Reduced {
    let two_den: BigInt = den << 1u32;
    // theta mod 2 = t / den
    let t = num.mod_floor(&two_den);
    // t / den = q/2 + rem / (2 den), rem in [0, den)
    let (q, rem) = (&t << 1u32).div_rem(den);
    let q = q.to_u8().expect("quadrant in 0..4");
    let (w_num, inner_swap) = if (&rem << 1u32) <= *den {
        (rem, false)
    } else {
        (den - rem, true)
    };
    // (sin, cos) of pi(q/2 + u) in terms of S = sin(pi u), C = cos(pi u).
    let (outer_swap, s_neg, c_neg) = match q {
        0 => (false, false, false),
        1 => (true, false, true),
        2 => (false, true, true),
        _ => (true, true, false),
    };
    Reduced {
        w_num,
        w_den: two_den,
        swap: inner_swap ^ outer_swap,
        s_neg,
        c_neg,
    }
}

/// `(sin x, cos x)` for `x` in `[lo, hi] ⊂ [0, 0.8]`, relative precision `prec`.
fn sin_cos_interval(lo: &Dyadic, hi: &Dyadic, prec: u32) -> (IntervalReal, IntervalReal) {
    let one = Dyadic::one();
    let span = hi.sub(lo);
    if hi.top() < -((prec / 2) as i64) - 8 {
        let s_lo = lo.sub(&lo.mul(lo).mul(lo).div(
            &Dyadic::from_int(BigInt::from(6)),
            prec + GUARD,
            Round::Up,
        ));
        let c_lo = one.sub(&hi.mul(hi).mul_pow2(-1));
        return (
            IntervalReal::new(s_lo, hi.clone(), prec),
            IntervalReal::new(c_lo, one, prec),
        );
    }
    let depth = (-lo.top()).max(0) as u32;
    let (s, c) = sin_cos_small(lo, prec + depth + GUARD);
    // Both functions are 1-Lipschitz.
    let s_hi = s.upper().add(&span).min(one.clone());
    let c_lo = c.lower().sub(&span);
    (
        IntervalReal::new(s.lower(), s_hi, prec),
        IntervalReal::new(c_lo, c.upper().min(one), prec),
    )
}

/// `(sin(pi theta), cos(pi theta))` with exact reduction of `theta` mod 2.
pub fn sin_cos_pi(theta: &Rat, prec: u32) -> (IntervalReal, IntervalReal) {
    sin_cos_pi_frac(theta.numer(), theta.denom(), prec)
}

/// `(sin, cos)` of `pi num/den` for `den > 0`; the fraction need not be in
/// lowest terms, which spares a gcd on long products.
pub fn sin_cos_pi_frac(num: &BigInt, den: &BigInt, prec: u32) -> (IntervalReal, IntervalReal) {
    assert!(den.is_positive(), "denominator must be positive");
    let red = reduce_pi(num, den);
    let (s, c) = if red.w_num.is_zero() {
        (IntervalReal::zero(prec), IntervalReal::one(prec))
    } else {
        let p = prec + GUARD;
        let pf = pi_fixed(p + GUARD);
        let (w_lo, w_hi) = Dyadic::ratio_bounds(&red.w_num, &red.w_den, p);
        let x_lo = pf.lower().mul(&w_lo).round(p, Round::Down);
        let x_hi = pf.upper().mul(&w_hi).round(p, Round::Up);
        sin_cos_interval(&x_lo, &x_hi, prec)
    };
    let (s, c) = if red.swap { (c, s) } else { (s, c) };
    let s = if red.s_neg { s.neg() } else { s };
    let c = if red.c_neg { c.neg() } else { c };
    (s, c)
}

/// Enclosure of `sin(pi theta)`; `theta` may carry an enormous numerator.
pub fn sin_pi(theta: &Rat, prec: u32) -> IntervalReal {
    sin_cos_pi(theta, prec).0
}

/// Enclosure of `cos(pi theta)`.
pub fn cos_pi(theta: &Rat, prec: u32) -> IntervalReal {
    sin_cos_pi(theta, prec).1
}

/// `n` as an exact interval.
pub fn int_interval(n: &BigInt) -> IntervalReal {
    let bits = (n.bits() as u32).max(1);
    IntervalReal::from_int(n, bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn contains(iv: &IntervalReal, digits: &str) -> bool {
        iv.contains_rat(&digits.parse::<Rat>().unwrap())
    }

    #[test]
    fn sin_pi_examples() {
        let one = sin_pi(&Rat::ratio(1, 2), 64);
        assert!(contains(&one, "1"));
        assert!(one.width().to_rat() <= Rat::pow2(-62));
        let zero = sin_pi(&Rat::zero(), 64);
        assert!(zero.is_point() && zero.lower().is_zero());
        let half = sin_pi(&Rat::ratio(1, 6), 128);
        assert!(contains(&half, "0.5"));
        assert!(half.width().to_rat() <= Rat::pow2(-126));
    }

    #[test]
    fn quadrant_signs() {
        let s = sin_pi(&Rat::ratio(7, 6), 64);
        assert!(contains(&s, "-0.5"));
        let c = cos_pi(&Rat::ratio(2, 3), 64);
        assert!(contains(&c, "-0.5"));
        let c = cos_pi(&Rat::ratio(-1, 3), 64);
        assert!(contains(&c, "0.5"));
        let s = sin_pi(&Rat::ratio(-1, 2), 64);
        assert!(contains(&s, "-1"));
    }

    #[test]
    fn tiny_argument_is_relative() {
        let theta = Rat::pow2(-5000);
        let s = sin_pi(&theta, 64);
        assert!(s.is_positive());
        let rel = s.width().div(s.lower(), 64, Round::Up);
        assert!(rel.top() < -60);
    }

    #[test]
    fn exp_examples() {
        assert_eq!(exp_rat(&Rat::zero(), 64).unwrap(), IntervalReal::one(64));
        let e = exp_upper(&Rat::from_i64(-1), 128).unwrap();
        assert!(contains(
            &e,
            "0.367879441171442321595523770161460867445811131031767834507836801"
        ));
        let tiny = exp_upper(&Rat::from_i64(-6500), 64).unwrap();
        assert!(tiny.upper().to_rat() <= Rat::pow2(-9377));
        assert!(tiny.lower().to_rat() >= Rat::pow2(-9378));
        assert!(exp_upper(&Rat::one(), 64).is_err());
    }

    #[test]
    fn decay_exponent_matches_floor() {
        assert_eq!(decay_exponent(&BigInt::from(1)).unwrap(), BigInt::from(2));
        assert_eq!(
            decay_exponent(&BigInt::from(6500)).unwrap(),
            BigInt::from(9378)
        );
        assert_eq!(
            decay_exponent(&BigInt::from(9400)).unwrap(),
            BigInt::from(13562)
        );
    }

    #[test]
    fn ln_and_log2() {
        let l = ln(&IntervalReal::from_int(&BigInt::from(10), 64), 128).unwrap();
        assert!(contains(
            &l,
            "2.30258509299404568401799145468436420760110148862877297603332790"
        ));
        let l2 = log2(&IntervalReal::from_int(&BigInt::from(66), 64), 128).unwrap();
        assert!(contains(
            &l2,
            "6.0443941193584534376531019906736094674630459333742491317685543"
        ));
        let exact = log2(&IntervalReal::from_int(&BigInt::from(1024), 64), 64).unwrap();
        assert!(exact.is_point());
        let small = ln(&IntervalReal::from_rat(&Rat::ratio(3, 4), 64), 100).unwrap();
        assert!(contains(
            &small,
            "-0.2876820724517809274392190059938274315035"
        ));
    }

    #[test]
    fn ln_of_huge_integer_is_sharp() {
        let n = (BigInt::one() << 20000u32) + BigInt::from(12345);
        let l = ln_int(&n, 20100).unwrap();
        assert!(l.width().top() < -20000 + 20);
        let l2 = ln2(20100).mul(&IntervalReal::from_int(&BigInt::from(20000), 64));
        assert!(l.lower() > l2.upper());
    }
}
