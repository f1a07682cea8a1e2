//! Lehmer's gcd. The binary algorithm shipped with `num-bigint` is quadratic
//! in the bit length and degrades badly when one operand is much shorter,
//! which is the common shape here (a 10^4-digit integer against `q_k`).

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

pub(crate) fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    BigInt::from(gcd_uint(a.magnitude(), b.magnitude()))
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn gcd_uint(a: &BigUint, b: &BigUint) -> BigUint {
    let (mut a, mut b) = if a >= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    loop {
        if b.is_zero() {
            return a;
        }
        if let Some(small) = b.to_u64() {
            let r = (&a % small)
                .to_u64()
                .expect("remainder below a u64 modulus");
            return BigUint::from(gcd_u64(small, r));
        }
        let n = a.bits();
        if n - b.bits() >= 32 {
            let r = &a % &b;
            a = std::mem::replace(&mut b, r);
            continue;
        }
        // Simulate the quotient sequence on the leading 63 bits (Knuth, Algorithm L).
        let shift = n - 63;
        let mut x = (&a >> shift).to_u64().expect("63 leading bits") as i128;
        let mut y = (&b >> shift).to_u64().expect("63 leading bits") as i128;
        let (mut ca, mut cb, mut cc, mut cd) = (1i128, 0i128, 0i128, 1i128);
        loop {
            if y + cc <= 0 || y + cd <= 0 {
                break;
            }
            let q = (x + ca) / (y + cc);
            if q != (x + cb) / (y + cd) {
                break;
            }
            (ca, cc) = (cc, ca - q * cc);
            (cb, cd) = (cd, cb - q * cd);
            (x, y) = (y, x - q * y);
        }
        if cb != 0 {
            let ai = BigInt::from_biguint(Sign::Plus, a.clone());
            let bi = BigInt::from_biguint(Sign::Plus, b.clone());
            let na = &ai * ca + &bi * cb;
            let nb = &ai * cc + &bi * cd;
            if let (Some(na), Some(nb)) = (na.to_biguint(), nb.to_biguint()) {
                (a, b) = if na >= nb { (na, nb) } else { (nb, na) };
                continue;
            }
        }
        let r = a.mod_floor(&b);
        a = std::mem::replace(&mut b, r);
    }
}
