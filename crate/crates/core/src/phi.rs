//! Target growth functions and the two monotone searches over them.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arithmetic::{exp, ln, ln2, log2, Dyadic, IntervalReal, PrecisionPolicy, Rat, Round};
use crate::error::{Error, Result};

/// Largest intermediate integer (in bits) built by the exact comparison paths.
const EXACT_BITS: u64 = 1 << 22;

/// Shape of `φ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `a + b x^β`.
    Power { beta: Rat },
    /// `a + b ln(1 + x)`.
    Log,
    /// `a + b log2(1 + x)`.
    Log2,
}

/// A concave, increasing, unbounded, sublinear target with `φ(1) >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PhiSpec", into = "PhiSpec")]
pub struct GrowthFunction {
    family: Family,
    a: Rat,
    b: Rat,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct PhiSpec {
    family: String,
    a: Rat,
    b: Rat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<Rat>,
}

impl TryFrom<PhiSpec> for GrowthFunction {
    type Error = Error;

    fn try_from(s: PhiSpec) -> Result<Self> {
        let family = match (s.family.as_str(), s.beta) {
            ("power", Some(beta)) => Family::Power { beta },
            ("power", None) => return Err(Error::parse("power family needs beta")),
            ("log", None) => Family::Log,
            ("log2", None) => Family::Log2,
            ("log" | "log2", Some(_)) => {
                return Err(Error::parse("beta is only meaningful for the power family"))
            }
            (other, _) => return Err(Error::parse(format!("unknown family `{other}`"))),
        };
        GrowthFunction::new(family, s.a, s.b)
    }
}

impl From<GrowthFunction> for PhiSpec {
    fn from(g: GrowthFunction) -> Self {
        let (family, beta) = match g.family {
            Family::Power { beta } => ("power", Some(beta)),
            Family::Log => ("log", None),
            Family::Log2 => ("log2", None),
        };
        PhiSpec {
            family: family.into(),
            a: g.a,
            b: g.b,
            beta,
        }
    }
}

impl GrowthFunction {
    pub fn new(family: Family, a: Rat, b: Rat) -> Result<Self> {
        if !b.is_positive() {
            return Err(Error::domain("φ needs b > 0 to be increasing"));
        }
        if let Family::Power { beta } = &family {
            if !beta.is_positive() || *beta >= Rat::one() {
                return Err(Error::domain("power family needs 0 < beta < 1"));
            }
            if beta.numer().bits() > 31 || beta.denom().bits() > 31 {
                return Err(Error::domain(
                    "beta numerator and denominator must fit 31 bits",
                ));
            }
        }
        let g = GrowthFunction { family, a, b };
        // φ(1) >= 2, certified exactly or by intervals.
        if g.cmp_value(&Rat::one(), &Rat::from_i64(2), &PrecisionPolicy::default())?
            == Ordering::Less
        {
            return Err(Error::domain(format!("φ(1) < 2 for {g}")));
        }
        Ok(g)
    }

    pub fn power(a: Rat, b: Rat, beta: Rat) -> Result<Self> {
        GrowthFunction::new(Family::Power { beta }, a, b)
    }

    pub fn log(a: Rat, b: Rat) -> Result<Self> {
        GrowthFunction::new(Family::Log, a, b)
    }

    pub fn log2(a: Rat, b: Rat) -> Result<Self> {
        GrowthFunction::new(Family::Log2, a, b)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn a(&self) -> &Rat {
        &self.a
    }

    pub fn b(&self) -> &Rat {
        &self.b
    }

    fn beta_parts(&self) -> Option<(u32, u32)> {
        match &self.family {
            Family::Power { beta } => Some((
                beta.numer().to_u32().expect("checked at construction"),
                beta.denom().to_u32().expect("checked at construction"),
            )),
            _ => None,
        }
    }

    /// Enclosure of the shape term: `x^β`, `ln(1+x)` or `log2(1+x)`.
    fn shape(&self, x: &Rat, prec: u32) -> Result<IntervalReal> {
        match &self.family {
            Family::Power { .. } => {
                let (u, v) = self.beta_parts().expect("power family");
                pow_ratio(x, u, v, prec)
            }
            Family::Log => ln(
                &IntervalReal::from_rat(&(x + &Rat::one()), prec + 32),
                prec + 8,
            ),
            Family::Log2 => log2(
                &IntervalReal::from_rat(&(x + &Rat::one()), prec + 32),
                prec + 8,
            ),
        }
    }

    /// Certified enclosure of `φ(x)` with roughly `prec` relative bits.
    pub fn eval(&self, x: &Rat, prec: u32) -> Result<IntervalReal> {
        if *x < Rat::one() {
            return Err(Error::domain("φ is evaluated on x >= 1 only"));
        }
        let p = prec + 8;
        let s = self.shape(x, p)?;
        let v = IntervalReal::from_rat(&self.a, p).add(&s.mul_rat(&self.b));
        Ok(v.with_precision(prec))
    }

    pub fn eval_int(&self, n: &BigInt, prec: u32) -> Result<IntervalReal> {
        self.eval(&Rat::from_integer(n.clone()), prec)
    }

    /// Enclosure of `φ'(x)`.
    pub fn derivative(&self, x: &Rat, prec: u32) -> Result<IntervalReal> {
        if *x < Rat::one() {
            return Err(Error::domain("φ' is evaluated on x >= 1 only"));
        }
        let p = prec + 8;
        let b = IntervalReal::from_rat(&self.b, p);
        let xp1 = IntervalReal::from_rat(&(x + &Rat::one()), p);
        let d = match &self.family {
            Family::Power { beta } => {
                let s = self.shape(x, p)?;
                s.mul_rat(beta).mul(&b).div(&IntervalReal::from_rat(x, p))?
            }
            Family::Log => b.div(&xp1)?,
            Family::Log2 => b.div(&xp1.mul(&ln2(p)))?,
        };
        Ok(d.with_precision(prec))
    }

    /// Sign of `φ(x) - y`. Exact whenever the comparison reduces to integers
    /// of moderate size; otherwise decided by intervals with precision doubling.
    pub fn cmp_value(&self, x: &Rat, y: &Rat, policy: &PrecisionPolicy) -> Result<Ordering> {
        self.cmp_value_from(x, y, policy, policy.start)
    }

    fn cmp_value_from(
        &self,
        x: &Rat,
        y: &Rat,
        policy: &PrecisionPolicy,
        start: u32,
    ) -> Result<Ordering> {
        if *x < Rat::one() {
            return Err(Error::domain("φ is evaluated on x >= 1 only"));
        }
        // Shape term versus z = (y - a) / b.
        let z = (y - &self.a).checked_div(&self.b)?;
        if let Some(ord) = self.cmp_shape_exact(x, &z) {
            return Ok(ord);
        }
        let scale = x.bit_size() + y.bit_size() + self.a.bit_size() + self.b.bit_size();
        let cap = policy.cap(scale);
        let mut prec = start.clamp(policy.start.min(cap), cap);
        loop {
            let m = self
                .eval(x, prec)?
                .sub(&IntervalReal::from_rat(y, prec + 8));
            if m.is_positive() {
                return Ok(Ordering::Greater);
            }
            if m.is_negative() {
                return Ok(Ordering::Less);
            }
            if m.is_point() {
                return Ok(Ordering::Equal);
            }
            if prec >= cap {
                return Err(Error::Indeterminate {
                    what: format!("φ({}) against {}", short(x), short(y)),
                    precision: prec,
                });
            }
            prec = prec.saturating_mul(2).min(cap);
        }
    }

    /// Exact comparison of the shape term with `z`, when affordable.
    fn cmp_shape_exact(&self, x: &Rat, z: &Rat) -> Option<Ordering> {
        match &self.family {
            Family::Power { .. } => {
                if !z.is_positive() {
                    return Some(Ordering::Greater);
                }
                let (u, v) = self.beta_parts()?;
                // x^(u/v) vs P/Q  <=>  n^u Q^v vs P^v d^u  with x = n/d.
                let cost = x.numer().bits() * u as u64
                    + x.denom().bits() * u as u64
                    + (z.numer().bits() + z.denom().bits()) * v as u64;
                if cost > EXACT_BITS {
                    return None;
                }
                let lhs = num_traits::pow(x.numer().clone(), u as usize)
                    * num_traits::pow(z.denom().clone(), v as usize);
                let rhs = num_traits::pow(z.numer().clone(), v as usize)
                    * num_traits::pow(x.denom().clone(), u as usize);
                Some(lhs.cmp(&rhs))
            }
            Family::Log2 => {
                // log2(1+x) >= 1 > 0 for x >= 1.
                if !z.is_positive() {
                    return Some(Ordering::Greater);
                }
                // log2(n/d) vs P/Q  <=>  n^Q vs 2^P d^Q.
                let y1 = x + &Rat::one();
                let q = z.denom().to_u64()?;
                let p = z.numer().to_u64()?;
                let cost = (y1.numer().bits() + y1.denom().bits())
                    .saturating_mul(q)
                    .saturating_add(p);
                if cost > EXACT_BITS {
                    return None;
                }
                let lhs = num_traits::pow(y1.numer().clone(), q as usize);
                let rhs = num_traits::pow(y1.denom().clone(), q as usize) << p;
                Some(lhs.cmp(&rhs))
            }
            Family::Log => {
                if !z.is_positive() {
                    return Some(Ordering::Greater);
                }
                None
            }
        }
    }

    /// `log2 φ(2^g)`, uncertified; used only to seed searches.
    fn log2_at_pow2(&self, g: f64) -> f64 {
        let a = self.a.to_f64_lossy();
        let b = self.b.to_f64_lossy();
        let shape = match &self.family {
            Family::Power { beta } => {
                let e = beta.to_f64_lossy() * g;
                if e > 900.0 {
                    return e
                        + b.log2()
                        + (1.0 + a / (b * 2f64.powf(e.min(1000.0))))
                            .max(1e-300)
                            .log2();
                }
                2f64.powf(e)
            }
            Family::Log => (g + (1.0 + 2f64.powf(-g)).log2()) * std::f64::consts::LN_2,
            Family::Log2 => g + (1.0 + 2f64.powf(-g)).log2(),
        };
        (a + b * shape).max(1e-300).log2()
    }

    /// Smallest `N > floor` with `r N >= φ(N)`.
    ///
    /// `h(N) = r N - φ(N)` is convex, so once positive past `floor` it stays
    /// positive; the search brackets the crossing by galloping and closes the
    /// bracket with Newton steps from the right, secant steps from the left
    /// and bisection as a safeguard. Every bracket update is certified.
    pub fn first_crossing(
        &self,
        r: &Rat,
        floor: &BigInt,
        policy: &PrecisionPolicy,
    ) -> Result<BigInt> {
        if !r.is_positive() || *r > Rat::one() {
            return Err(Error::precondition("first_crossing needs 0 < r <= 1"));
        }
        if *floor < BigInt::one() {
            return Err(Error::precondition("first_crossing needs floor >= 1"));
        }
        let floor_r = Rat::from_integer(floor.clone());
        if self.cmp_value(&floor_r, &(r * &floor_r), policy)? != Ordering::Greater {
            return Err(Error::precondition(format!(
                "r·floor >= φ(floor) at floor = {}",
                short_int(floor)
            )));
        }
        let search = Crossing {
            phi: self,
            r,
            policy,
        };
        let (mut lo, mut hi) = search.bracket(floor)?;
        while &hi - &lo > BigInt::one() {
            let width = &hi - &lo;
            let prec = search.estimate_precision(&hi, &width);
            let (h_hi, slope) = search.h_and_slope(&hi, prec)?;
            if let Some(c) = search.newton_from(&hi, &h_hi, &slope)? {
                if c > lo && c < hi {
                    if search.crosses(&c, prec)? {
                        hi = c;
                    } else {
                        lo = c;
                    }
                }
                // At full resolution the Newton iterate is the answer or its
                // neighbour; certifying the left neighbour closes the bracket.
                if prec as u64 > hi.bits() + 32 {
                    let left = &hi - 1u32;
                    if left > lo && !search.crosses(&left, prec)? {
                        lo = left;
                    }
                }
            }
            if (&hi - &lo) * 2 > width {
                let h_lo = search.h_and_slope(&lo, prec)?.0;
                let h_hi = search.h_and_slope(&hi, prec)?.0;
                if let Some(c) = search.secant(&lo, &hi, &h_lo, &h_hi)? {
                    if c > lo && c < hi {
                        if search.crosses(&c, prec)? {
                            hi = c;
                        } else {
                            lo = c;
                        }
                    }
                }
            }
            if (&hi - &lo) * 2 > width {
                let mid: BigInt = (&lo + &hi) >> 1u32;
                if search.crosses(&mid, prec)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        }
        Ok(hi)
    }

    /// Smallest integer `M >= 1` with `φ(M) >= y`, for `y > φ(1)`.
    pub fn inverse_threshold(&self, y: &Rat, policy: &PrecisionPolicy) -> Result<BigInt> {
        if self.cmp_value(&Rat::one(), y, policy)? != Ordering::Less {
            return Err(Error::precondition("inverse_threshold needs y > φ(1)"));
        }
        let geq = |m: &BigInt| -> Result<bool> {
            Ok(self.cmp_value(&Rat::from_integer(m.clone()), y, policy)? != Ordering::Less)
        };
        let mut m = match self.threshold_candidate(y)? {
            Some(c) if c >= BigInt::one() => c,
            _ => BigInt::one(),
        };
        // Walk a few steps from the candidate; fall back to a full search.
        let mut steps = 0;
        loop {
            if geq(&m)? {
                let prev = &m - 1u32;
                if prev < BigInt::one() || !geq(&prev)? {
                    return Ok(m);
                }
                m = prev;
            } else {
                m += 1u32;
            }
            steps += 1;
            if steps > 8 {
                break;
            }
        }
        // Exponential search for an upper bound, then bisection.
        let mut lo = BigInt::one();
        let mut hi = BigInt::from(2u8);
        while !geq(&hi)? {
            lo = hi.clone();
            hi <<= 1u32;
        }
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1u32;
            if geq(&mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Estimated bit length of `inverse_threshold(y)`, uncertified.
    pub fn threshold_bits_estimate(&self, y: &Rat) -> f64 {
        let z = (y - &self.a)
            .checked_div(&self.b)
            .map(|z| z.to_f64_lossy())
            .unwrap_or(0.0);
        if z <= 0.0 {
            return 1.0;
        }
        match &self.family {
            Family::Power { beta } => z.log2() / beta.to_f64_lossy(),
            Family::Log => z * std::f64::consts::LOG2_E,
            Family::Log2 => z,
        }
    }

    /// Closed-form inverse rounded to an integer near the threshold.
    fn threshold_candidate(&self, y: &Rat) -> Result<Option<BigInt>> {
        let z = (y - &self.a).checked_div(&self.b)?;
        if !z.is_positive() {
            return Ok(None);
        }
        match &self.family {
            Family::Power { .. } => {
                let (u, v) = self.beta_parts().expect("power family");
                // x = z^(v/u): u-th root of floor(z^v).
                if (z.numer().bits() + z.denom().bits()) * v as u64 > EXACT_BITS {
                    return Ok(None);
                }
                let zv = num_traits::pow(z.numer().clone(), v as usize)
                    / num_traits::pow(z.denom().clone(), v as usize);
                Ok(Some(zv.nth_root(u)))
            }
            Family::Log2 | Family::Log => {
                let scale = match &self.family {
                    Family::Log2 => z.clone(),
                    _ => &z * &Rat::ratio(1_442_695_040_888_963_407, 1_000_000_000_000_000_000),
                };
                let bits = scale.ceil().to_u64().unwrap_or(u64::MAX);
                if bits > EXACT_BITS * 4 {
                    return Ok(None);
                }
                let prec = bits as u32 + 64;
                // 2^z or e^z, minus one.
                let arg = match &self.family {
                    Family::Log2 => IntervalReal::from_rat(&z, prec).mul(&ln2(prec)),
                    _ => IntervalReal::from_rat(&z, prec),
                };
                let e = exp(&arg, prec)?;
                let mid = Dyadic::from_rat(&e.mid(), prec, Round::Up).ceil();
                Ok(Some(mid - 1u32))
            }
        }
    }
}

/// `x^(u/v)` for rational `x > 0`, by exact integer roots when affordable.
fn pow_ratio(x: &Rat, u: u32, v: u32, prec: u32) -> Result<IntervalReal> {
    let n = x.numer();
    let d = x.denom();
    let cost = (n.bits() + d.bits()) * v as u64;
    if cost <= EXACT_BITS {
        // x^(u/v) = (n^u d^(v-u))^(1/v) / d.
        let z =
            num_traits::pow(n.clone(), u as usize) * num_traits::pow(d.clone(), (v - u) as usize);
        let root_bits = z.bits() / v as u64;
        let s = (prec as u64 + 8).saturating_sub(root_bits);
        let scaled = &z << (s * v as u64);
        let root = scaled.nth_root(v);
        let exact = num_traits::pow(root.clone(), v as usize) == scaled;
        let lo = Dyadic::new(root.clone(), -(s as i64));
        let hi = if exact {
            lo.clone()
        } else {
            Dyadic::new(root + 1u32, -(s as i64))
        };
        let r = IntervalReal::new(lo, hi, prec + 8);
        if d.is_one() {
            return Ok(r.with_precision(prec));
        }
        let dd = IntervalReal::from_int(d, (d.bits() as u32).max(1));
        return r.div(&dd).map(|q| q.with_precision(prec));
    }
    let p = prec + 64;
    let l = ln(&IntervalReal::from_rat(x, p), p)?;
    let beta = Rat::new(BigInt::from(u), BigInt::from(v))?;
    exp(&l.mul_rat(&beta), p).map(|e| e.with_precision(prec))
}

struct Crossing<'a> {
    phi: &'a GrowthFunction,
    r: &'a Rat,
    policy: &'a PrecisionPolicy,
}

impl Crossing<'_> {
    /// Certified `r N >= φ(N)`.
    fn crosses(&self, n: &BigInt, start: u32) -> Result<bool> {
        let x = Rat::from_integer(n.clone());
        let y = self.r * &x;
        Ok(self.phi.cmp_value_from(&x, &y, self.policy, start)? != Ordering::Greater)
    }

    /// Midpoint estimates of `h(N)` and `h'(N)`.
    fn h_and_slope(&self, n: &BigInt, prec: u32) -> Result<(Rat, Rat)> {
        let x = Rat::from_integer(n.clone());
        let h = &(self.r * &x) - &self.phi.eval(&x, prec)?.mid();
        let slope = self.r - &self.phi.derivative(&x, prec)?.mid();
        Ok((h, slope))
    }

    /// Precision at which estimates resolve the bracket `[hi - width, hi]`.
    fn estimate_precision(&self, hi: &BigInt, width: &BigInt) -> u32 {
        let nb = hi.bits() as i64;
        let wb = width.bits() as i64;
        let p = 2 * (nb - wb) + 64;
        p.clamp(64, nb + 64) as u32
    }

    fn newton_from(&self, hi: &BigInt, h: &Rat, slope: &Rat) -> Result<Option<BigInt>> {
        if !slope.is_positive() {
            return Ok(None);
        }
        let step = h.checked_div(slope)?;
        Ok(Some((&Rat::from_integer(hi.clone()) - &step).ceil()))
    }

    fn secant(&self, lo: &BigInt, hi: &BigInt, h_lo: &Rat, h_hi: &Rat) -> Result<Option<BigInt>> {
        let denom = h_hi - h_lo;
        if !denom.is_positive() {
            return Ok(None);
        }
        let span = Rat::from_integer(hi - lo);
        let s = &Rat::from_integer(lo.clone()) - &(h_lo * &span).checked_div(&denom)?;
        Ok(Some(s.floor()))
    }

    /// Initial `(lo, hi)` with `h(lo) < 0 <= h(hi)`, seeded in the log domain.
    fn bracket(&self, floor: &BigInt) -> Result<(BigInt, BigInt)> {
        let lr = self.r.log2_estimate();
        let f = |g: f64| lr + g - self.phi.log2_at_pow2(g);
        let g0 = (floor.bits() as f64 - 1.0).max(0.0);
        let mut g_hi = g0.max(1.0);
        let mut guard = 0;
        while f(g_hi) <= 0.0 && guard < 80 {
            g_hi = g_hi * 2.0 + 1.0;
            guard += 1;
        }
        let mut g_lo = g0;
        for _ in 0..200 {
            let mid = 0.5 * (g_lo + g_hi);
            if f(mid) > 0.0 {
                g_hi = mid;
            } else {
                g_lo = mid;
            }
        }
        let guess = pow2_f64(g_hi);
        let margin = (&guess >> 20u32) + 2u32;
        let mut lo = floor.clone();
        let below = &guess - &margin;
        if below > lo && !self.crosses(&below, self.policy.start)? {
            lo = below;
        }
        let mut hi = (&guess + &margin).max(&lo + 1u32);
        while !self.crosses(&hi, self.policy.start)? {
            lo = hi.clone();
            hi <<= 1u32;
        }
        Ok((lo, hi))
    }
}

fn pow2_f64(g: f64) -> BigInt {
    if g < 60.0 {
        return BigInt::from(2f64.powf(g).ceil() as u64);
    }
    let whole = g.floor();
    let frac = g - whole;
    let mant = (2f64.powf(frac) * 2f64.powi(52)).ceil() as u64;
    BigInt::from(mant) << (whole as u64 - 52)
}

fn short_int(n: &BigInt) -> String {
    if n.bits() <= 64 {
        n.to_string()
    } else {
        format!("~2^{}", n.bits() - 1)
    }
}

fn short(x: &Rat) -> String {
    if x.bit_size() <= 96 {
        x.to_string()
    } else {
        format!("~2^{:.1}", x.log2_estimate())
    }
}

impl fmt::Display for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Power { beta } => write!(f, "power:{},{},{}", self.a, self.b, beta),
            Family::Log => write!(f, "log:{},{}", self.a, self.b),
            Family::Log2 => write!(f, "log2:{},{}", self.a, self.b),
        }
    }
}

impl FromStr for GrowthFunction {
    type Err = Error;

    /// Parses `power:a,b,beta`, `log:a,b` or `log2:a,b`.
    fn from_str(s: &str) -> Result<Self> {
        let (family, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::parse(format!("expected family:params, got `{s}`")))?;
        let params: Vec<Rat> = rest
            .split(',')
            .map(|p| p.trim().parse::<Rat>())
            .collect::<Result<_>>()?;
        match (family.trim(), params.as_slice()) {
            ("power", [a, b, beta]) => GrowthFunction::power(a.clone(), b.clone(), beta.clone()),
            ("log", [a, b]) => GrowthFunction::log(a.clone(), b.clone()),
            ("log2", [a, b]) => GrowthFunction::log2(a.clone(), b.clone()),
            _ => Err(Error::parse(format!("cannot parse growth function `{s}`"))),
        }
    }
}
