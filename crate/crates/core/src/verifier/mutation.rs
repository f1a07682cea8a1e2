//! Single-parameter corruptions of a sound state, for negative controls.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arithmetic::Rat;
use crate::construction::{ConstructionState, Threshold};
use crate::error::{Error, Result};
use crate::phi::GrowthFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    DoubleR1,
    HalveR1,
    Q2OffByOne,
    N1MinusOne,
    N1PlusOne,
    M1ToOne,
    K1Bumped,
    ShiftA1,
    DoubleRLast,
    PhiShifted,
}

impl Mutation {
    pub const ALL: [Mutation; 10] = [
        Mutation::DoubleR1,
        Mutation::HalveR1,
        Mutation::Q2OffByOne,
        Mutation::N1MinusOne,
        Mutation::N1PlusOne,
        Mutation::M1ToOne,
        Mutation::K1Bumped,
        Mutation::ShiftA1,
        Mutation::DoubleRLast,
        Mutation::PhiShifted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::DoubleR1 => "double-r1",
            Mutation::HalveR1 => "halve-r1",
            Mutation::Q2OffByOne => "q2-off-by-one",
            Mutation::N1MinusOne => "n1-minus-one",
            Mutation::N1PlusOne => "n1-plus-one",
            Mutation::M1ToOne => "m1-to-one",
            Mutation::K1Bumped => "k1-bumped",
            Mutation::ShiftA1 => "shift-a1",
            Mutation::DoubleRLast => "double-r-last",
            Mutation::PhiShifted => "phi-shifted",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Mutation::DoubleR1 => "r_1 doubled",
            Mutation::HalveR1 => "r_1 halved",
            Mutation::Q2OffByOne => "q_2 increased by one",
            Mutation::N1MinusOne => "N_1 decreased by one",
            Mutation::N1PlusOne => "N_1 increased by one",
            Mutation::M1ToOne => "M_1 replaced by 1",
            Mutation::K1Bumped => "k_1 increased by one",
            Mutation::ShiftA1 => "A_1 shifted right by its width",
            Mutation::DoubleRLast => "r_P doubled",
            Mutation::PhiShifted => "φ replaced by φ + 1",
        }
    }

    /// Checks that must turn to FAIL on the reference state.
    pub fn expected_failures(self) -> &'static [&'static str] {
        match self {
            Mutation::DoubleR1 => &["ind-14"],
            Mutation::HalveR1 => &["ind-16"],
            Mutation::Q2OffByOne => &["lacunarity-3", "q-recurrence"],
            Mutation::N1MinusOne => &["ind-16", "q-recurrence"],
            Mutation::N1PlusOne => &["ind-15", "q-recurrence"],
            Mutation::M1ToOne => &["ind-13"],
            Mutation::K1Bumped => &["k-index"],
            Mutation::ShiftA1 => &["a-interval"],
            Mutation::DoubleRLast => &["ind-14"],
            Mutation::PhiShifted => &["ind-16"],
        }
    }

    /// The corrupted copy; needs depth >= 1, and depth >= 2 where a second
    /// level is touched.
    pub fn apply(self, state: &ConstructionState) -> Result<ConstructionState> {
        let depth = state.depth();
        if depth == 0 {
            return Err(Error::precondition("mutations need depth >= 1"));
        }
        let mut s = state.clone();
        let two = Rat::from_i64(2);
        match self {
            Mutation::DoubleR1 => s.r[0] = &s.r[0] * &two,
            Mutation::HalveR1 => s.r[0] = s.r[0].checked_div(&two)?,
            Mutation::Q2OffByOne => s.q[1] += 1u32,
            Mutation::N1MinusOne => s.n[1] -= 1u32,
            Mutation::N1PlusOne => s.n[1] += 1u32,
            Mutation::M1ToOne => s.m[1] = Threshold::Exact(BigInt::from(1)),
            Mutation::K1Bumped => s.k[0] += 1u32,
            Mutation::ShiftA1 => {
                let (lo, hi) = s.a[0].clone();
                let w = &hi - &lo;
                s.a[0] = (lo + &w, hi + &w);
            }
            Mutation::DoubleRLast => s.r[depth - 1] = &s.r[depth - 1] * &two,
            Mutation::PhiShifted => {
                let phi = &state.phi;
                s.phi = GrowthFunction::new(
                    phi.family().clone(),
                    phi.a() + &Rat::one(),
                    phi.b().clone(),
                )?;
            }
        }
        Ok(s)
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mutation::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::parse(format!("unknown mutation `{s}`")))
    }
}
