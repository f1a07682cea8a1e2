//! Outward-rounded decimal scientific notation for dyadic endpoints.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::dyadic::{Dyadic, Round};
use super::interval::IntervalReal;

/// Significant digits used for interval endpoints in emitted tables.
pub const DEFAULT_DIGITS: u32 = 20;

fn pow10(k: u64) -> BigInt {
    num_traits::pow(BigInt::from(10u8), k as usize)
}

/// `floor` or `ceil` of `|d| / 10^s` for a signed decimal shift `s`.
fn scaled(mag: &Dyadic, s: i64, dir: Round) -> BigInt {
    let mut num = mag.mant().clone();
    let mut den = BigInt::from(1u8);
    if mag.exp() >= 0 {
        num <<= mag.exp() as u64;
    } else {
        den <<= mag.exp().unsigned_abs();
    }
    if s >= 0 {
        den *= pow10(s as u64);
    } else {
        num *= pow10(s.unsigned_abs());
    }
    let (q, r) = num.div_rem(&den);
    if dir == Round::Up && !r.is_zero() {
        q + 1
    } else {
        q
    }
}

/// Formats `d` as `m.mmm…e±k` with `digits` significant digits, rounded in
/// direction `dir` so the printed value brackets `d` on the requested side.
pub fn format_sci(d: &Dyadic, digits: u32, dir: Round) -> String {
    if d.is_zero() {
        return "0e0".to_string();
    }
    let digits = digits.max(1);
    let neg = d.is_negative();
    let mag = d.abs();
    // Rounding a negative value down means rounding its magnitude up.
    let mdir = match (neg, dir) {
        (false, r) => r,
        (true, Round::Down) => Round::Up,
        (true, Round::Up) => Round::Down,
    };
    let top = mag.top();
    let lead = {
        let b = mag.mant().bits();
        let shift = b.saturating_sub(53);
        let m = (mag.mant() >> shift)
            .to_string()
            .parse::<f64>()
            .unwrap_or(1.0);
        m.log2() + shift as f64 + mag.exp() as f64
    };
    let _ = top;
    let mut k = (lead * std::f64::consts::LOG10_2).floor() as i64;
    let lo = pow10(digits as u64 - 1);
    let hi = pow10(digits as u64);
    let m = loop {
        let m = scaled(&mag, k - digits as i64 + 1, mdir);
        if m >= hi {
            k += 1;
        } else if m < lo && m.is_positive() {
            // Rounding up can land exactly on 10^digits; only step down on
            // genuine underestimates of the exponent.
            k -= 1;
        } else {
            break m;
        }
    };
    let text = m.to_string();
    let (first, rest) = text.split_at(1);
    let sign = if neg { "-" } else { "" };
    if rest.is_empty() {
        format!("{sign}{first}e{k}")
    } else {
        format!("{sign}{first}.{rest}e{k}")
    }
}

/// Both endpoints of an interval, outward rounded.
pub fn format_interval(x: &IntervalReal, digits: u32) -> (String, String) {
    (
        format_sci(x.lower(), digits, Round::Down),
        format_sci(x.upper(), digits, Round::Up),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::rat::Rat;

    fn d(n: i64) -> Dyadic {
        Dyadic::from_int(BigInt::from(n))
    }

    #[test]
    fn exact_values_print_exactly() {
        assert_eq!(format_sci(&d(102), 5, Round::Down), "1.0200e2");
        assert_eq!(format_sci(&Dyadic::pow2(-3), 3, Round::Up), "1.25e-1");
        assert_eq!(format_sci(&d(-7), 1, Round::Up), "-7e0");
    }

    #[test]
    fn directed_rounding_brackets() {
        let third = IntervalReal::from_rat(&Rat::ratio(1, 3), 128);
        let (lo, hi) = format_interval(&third, 20);
        assert_eq!(lo, "3.3333333333333333333e-1");
        assert_eq!(hi, "3.3333333333333333334e-1");
        let neg = third.neg();
        let (lo, hi) = format_interval(&neg, 20);
        assert_eq!(lo, "-3.3333333333333333334e-1");
        assert_eq!(hi, "-3.3333333333333333333e-1");
        let lo_r: Rat = lo.parse().unwrap();
        assert!(lo_r <= Rat::ratio(-1, 3));
    }

    #[test]
    fn extreme_exponents() {
        let tiny = Dyadic::pow2(-81252);
        let s = format_sci(&tiny, 6, Round::Down);
        assert!(s.ends_with("e-24460"), "{s}");
        let r: Rat = s.parse().unwrap();
        assert!(r <= tiny.to_rat());
    }
}
