//! Sign decisions on certified margins with automatic precision doubling.

use serde::{Deserialize, Serialize};

use super::dyadic::Dyadic;
use super::interval::IntervalReal;
use crate::error::Result;

/// Outcome of a certified comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
}

impl Status {
    /// Combines two statuses: any failure wins, then any indeterminate.
    pub fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Indeterminate, _) | (_, Status::Indeterminate) => Status::Indeterminate,
            _ => Status::Pass,
        }
    }
}

/// Working precision schedule: start at `start` bits and double until the
/// margin separates from zero, giving up past `max` bits beyond the scale of
/// the operands involved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    pub start: u32,
    pub max: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            start: 64,
            max: 4096,
        }
    }
}

impl PrecisionPolicy {
    pub fn new(start: u32, max: u32) -> Self {
        PrecisionPolicy { start, max }
    }

    /// Largest precision tried for operands spanning `scale_bits` bits.
    pub fn cap(&self, scale_bits: u64) -> u32 {
        let scale = u32::try_from(scale_bits).unwrap_or(u32::MAX / 2);
        self.max.saturating_add(scale).max(self.start)
    }
}

/// A decided margin together with the precision it was decided at.
#[derive(Clone, Debug)]
pub struct Decision {
    pub status: Status,
    pub margin: IntervalReal,
    pub precision: u32,
}

/// Sign of a margin interval: `margin >= 0` (or `> 0` when `strict`).
pub fn decide(margin: &IntervalReal, strict: bool) -> Status {
    let zero = Dyadic::zero();
    let (lo, hi) = (margin.lower(), margin.upper());
    let pass = if strict { *lo > zero } else { *lo >= zero };
    let fail = if strict { *hi <= zero } else { *hi < zero };
    if pass {
        Status::Pass
    } else if fail {
        Status::Fail
    } else {
        Status::Indeterminate
    }
}

/// Evaluates `margin(prec)` at increasing precision until its sign is certain.
pub fn certify<F>(
    policy: &PrecisionPolicy,
    scale_bits: u64,
    strict: bool,
    mut margin: F,
) -> Result<Decision>
where
    F: FnMut(u32) -> Result<IntervalReal>,
{
    let cap = policy.cap(scale_bits);
    let mut prec = policy.start.min(cap);
    loop {
        let m = margin(prec)?;
        let status = decide(&m, strict);
        if status != Status::Indeterminate || prec >= cap {
            return Ok(Decision {
                status,
                margin: m,
                precision: prec,
            });
        }
        prec = prec.saturating_mul(2).min(cap);
    }
}
