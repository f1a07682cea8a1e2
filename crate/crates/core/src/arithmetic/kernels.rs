//! Fixed-point series kernels. A [`Fixed`] value `v` at scale `w` with error
//! `e` encloses every real `x` with `|x * 2^w - v| <= e`.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::dyadic::Dyadic;
use super::interval::IntervalReal;

#[derive(Clone, Debug)]
pub(crate) struct Fixed {
    pub value: BigInt,
    pub err: BigInt,
    pub scale: u32,
}

impl Fixed {
    pub fn lower(&self) -> Dyadic {
        Dyadic::new(&self.value - &self.err, -(self.scale as i64))
    }

    pub fn upper(&self) -> Dyadic {
        Dyadic::new(&self.value + &self.err, -(self.scale as i64))
    }

    pub fn to_interval(&self, prec: u32) -> IntervalReal {
        IntervalReal::new(self.lower(), self.upper(), prec)
    }

    /// Drops to a coarser scale, keeping the enclosure.
    pub fn rescale(&self, scale: u32) -> Fixed {
        if scale >= self.scale {
            let s = (scale - self.scale) as u64;
            return Fixed {
                value: &self.value << s,
                err: &self.err << s,
                scale,
            };
        }
        let s = (self.scale - scale) as u64;
        Fixed {
            value: &self.value >> s,
            err: (&self.err >> s) + 1,
            scale,
        }
    }
}

fn bit_len(n: usize) -> u32 {
    usize::BITS - n.leading_zeros()
}

/// `sum_{k>=0} sign^k / ((2k+1) m^(2k+1))`: `atan(1/m)` for `alternate`, else `atanh(1/m)`.
fn arctan_series(m: u64, scale: u32, alternate: bool) -> Fixed {
    let m2 = BigInt::from(m) * m;
    let mut power = (BigInt::one() << scale as u64) / m;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / (2 * k + 1);
        if alternate && k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        power /= &m2;
        k += 1;
    }
    // Each term carries at most two truncations; the dropped tail is below one ulp.
    Fixed {
        value: sum,
        err: BigInt::from(2 * k + 2),
        scale,
    }
}

struct Cache {
    pi: Option<Fixed>,
    ln2: Option<Fixed>,
}

static CONSTANTS: Mutex<Cache> = Mutex::new(Cache {
    pi: None,
    ln2: None,
});

fn cached(slot: fn(&mut Cache) -> &mut Option<Fixed>, scale: u32, make: fn(u32) -> Fixed) -> Fixed {
    let mut guard = CONSTANTS.lock().unwrap_or_else(|p| p.into_inner());
    let entry = slot(&mut guard);
    if let Some(f) = entry.as_ref() {
        if f.scale >= scale {
            return f.rescale(scale);
        }
    }
    // Overshoot so nearby requests reuse the entry.
    let fresh = make(scale + scale / 4 + 64);
    let out = fresh.rescale(scale);
    *entry = Some(fresh);
    out
}

fn make_pi(scale: u32) -> Fixed {
    let guard = 16;
    let w = scale + guard;
    let a = arctan_series(5, w, true);
    let b = arctan_series(239, w, true);
    let value = (a.value * 16) - (b.value * 4);
    let err = a.err * 16 + b.err * 4;
    Fixed {
        value,
        err,
        scale: w,
    }
    .rescale(scale)
}

fn make_ln2(scale: u32) -> Fixed {
    let guard = 16;
    let w = scale + guard;
    let a = arctan_series(3, w, false);
    Fixed {
        value: a.value * 2,
        err: a.err * 2,
        scale: w,
    }
    .rescale(scale)
}

/// `pi` at the given fixed-point scale.
pub(crate) fn pi_fixed(scale: u32) -> Fixed {
    cached(|c| &mut c.pi, scale, make_pi)
}

/// `ln 2` at the given fixed-point scale.
pub(crate) fn ln2_fixed(scale: u32) -> Fixed {
    cached(|c| &mut c.ln2, scale, make_ln2)
}

/// Number of halvings for a Taylor kernel at `bits` of precision.
fn halvings(bits: u32) -> u32 {
    ((bits as f64).sqrt() / 2.0).ceil() as u32 + 2
}

/// `exp(t)` for an exact dyadic `|t| <= 1`, returned with about `bits` correct bits.
pub(crate) fn exp_small(t: &Dyadic, bits: u32) -> Fixed {
    debug_assert!(t.abs() <= Dyadic::one());
    let h = halvings(bits);
    let guard = h + 2 * bit_len(bits as usize) + 16;
    let w = bits + guard;
    // y = t / 2^h, truncated at scale w: input error below one ulp.
    let y = t.mul_pow2(w as i64 - h as i64).floor();
    let one = BigInt::one() << w as u64;
    let mut term = one.clone();
    let mut sum = one;
    let mut k: u64 = 1;
    loop {
        term = (&term * &y) >> w as u64;
        term /= k;
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    // Per-term truncation error stays below 4 ulps since |y| <= 1/2; the tail
    // past the first vanishing term is below 8 ulps; input error adds 2.
    let mut err = BigInt::from(4 * k + 10);
    let mut v = sum;
    for _ in 0..h {
        let next_err = ((BigInt::from(2u8) * v.abs() * &err + &err * &err) >> w as u64) + 2;
        v = (&v * &v) >> w as u64;
        err = next_err;
    }
    Fixed {
        value: v,
        err,
        scale: w,
    }
}

/// `(sin x, cos x)` for an exact dyadic `0 <= x <= 1`.
pub(crate) fn sin_cos_small(x: &Dyadic, bits: u32) -> (Fixed, Fixed) {
    debug_assert!(!x.is_negative() && *x <= Dyadic::one());
    let h = halvings(bits);
    let guard = 2 * h + 2 * bit_len(bits as usize) + 16;
    let w = bits + guard;
    let ws = w as u64;
    let y = x.mul_pow2(w as i64 - h as i64).floor();
    let one = BigInt::one() << ws;
    let mut term = one.clone();
    let mut s = BigInt::zero();
    let mut c = one.clone();
    let mut k: u64 = 1;
    loop {
        term = (&term * &y) >> ws;
        term /= k;
        if term.is_zero() {
            break;
        }
        match k % 4 {
            1 => s += &term,
            2 => c -= &term,
            3 => s -= &term,
            _ => c += &term,
        }
        k += 1;
    }
    let mut es = BigInt::from(4 * k + 10);
    let mut ec = es.clone();
    let two = BigInt::from(2u8);
    for _ in 0..h {
        let (sa, ca) = (s.abs(), c.abs());
        let nes = ((&two * (&ca * &es + &sa * &ec + &es * &ec)) >> ws) + 2;
        let nec = ((&two * (&two * &sa * &es + &es * &es)) >> ws) + 2;
        let ns = (&two * &s * &c) >> ws;
        let nc = &one - ((&two * &s * &s) >> ws);
        s = ns;
        c = nc;
        es = nes;
        ec = nec;
    }
    (
        Fixed {
            value: s,
            err: es,
            scale: w,
        },
        Fixed {
            value: c,
            err: ec,
            scale: w,
        },
    )
}
