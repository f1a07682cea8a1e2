//! Exact rationals, dyadic intervals and certified elementary functions.

mod decide;
mod decimal;
mod dyadic;
mod elementary;
mod gcd;
mod interval;
mod kernels;
mod rat;

pub use decide::{certify, decide, Decision, PrecisionPolicy, Status};
pub use decimal::{format_interval, format_sci, DEFAULT_DIGITS};
pub use dyadic::{Dyadic, Round};
pub use elementary::{
    cos_pi, decay_exponent, exp, exp_rat, exp_upper, int_interval, ln, ln2, ln_int, log2, pi,
    sin_cos_pi, sin_cos_pi_frac, sin_pi,
};
pub use interval::{ComplexInterval, IntervalReal};
pub use rat::{ceil_log2, cmp_fractions, frac, Rat};
