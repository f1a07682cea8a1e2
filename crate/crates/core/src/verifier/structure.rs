//! Exact checks on the integer and rational data of a state.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{CheckResult, Tally, VerifyConfig, Witness};
use crate::arithmetic::{certify, ln, ln2, IntervalReal, Rat};
use crate::construction::{
    interval_a, k_index, short_int, ConstructionState, DecayMode, Threshold,
};
use crate::error::{Error, Result};

/// Shape and sign conditions every other check relies on.
pub fn well_formed(state: &ConstructionState) -> std::result::Result<(), String> {
    let p = state.depth();
    if p == 0 {
        return Err("depth is 0".into());
    }
    let lens = [
        ("q", state.q.len(), p + 1),
        ("N", state.n.len(), p + 1),
        ("M", state.m.len(), p + 1),
        ("k", state.k.len(), p),
        ("A", state.a.len(), p),
    ];
    for (name, got, want) in lens {
        if got != want {
            return Err(format!("{name} has {got} entries, depth {p} needs {want}"));
        }
    }
    if let Some(i) = state.q.iter().position(|q| !q.is_positive()) {
        return Err(format!("q_{} is not positive", i + 1));
    }
    if let Some(i) = state.r.iter().position(|r| !r.is_positive()) {
        return Err(format!("r_{} is not positive", i + 1));
    }
    if let Some(j) = state.n.iter().position(|n| n < &BigInt::one()) {
        return Err(format!("N_{j} is below 1"));
    }
    for (j, m) in state.m.iter().enumerate() {
        match m {
            Threshold::Exact(m) if m < &BigInt::one() => return Err(format!("M_{j} is below 1")),
            Threshold::Deferred { .. } if j < p => {
                return Err(format!(
                    "M_{j} is deferred but level {} depends on it",
                    j + 1
                ))
            }
            _ => {}
        }
    }
    if let Some(i) = state.k.iter().position(|k| k.is_negative()) {
        return Err(format!("k_{} is negative", i + 1));
    }
    if let Some(i) = state.a.iter().position(|(lo, hi)| lo >= hi) {
        return Err(format!("A_{} is empty", i + 1));
    }
    Ok(())
}

fn at(p: usize) -> Witness {
    Witness {
        p: Some(p),
        ..Witness::default()
    }
}

fn q_ratio(state: &ConstructionState, n: usize) -> Rat {
    Rat::new(state.q(n).clone(), state.q(n + 1).clone()).expect("positive q")
}

/// `-ln r - q`, positive iff `r < exp(-q)`.
fn decay_margin(r: &Rat, q: &BigInt, prec: u32) -> Result<IntervalReal> {
    let log = match r.as_pow2() {
        Some(e) => ln2(prec).mul_rat(&Rat::from_i64(-e)),
        None => ln(&IntervalReal::from_rat(r, prec + 16), prec)?.neg(),
    };
    Ok(log.sub(&IntervalReal::from_int(q, prec)))
}

/// Lacunarity, decay, recurrence, checkpoint ordering, indices, intervals,
/// nesting and the position of `α`. A malformed state yields only the
/// `well-formed` result.
pub fn verify_structure(
    state: &ConstructionState,
    alpha: &Rat,
    config: &VerifyConfig,
    notes: &mut Vec<String>,
) -> Result<Vec<CheckResult>> {
    let mut wf = Tally::new("well-formed", None, None);
    let shape = well_formed(state);
    wf.record_flag(shape.is_ok(), Witness::default());
    if let Err(e) = shape {
        notes.push(format!("well-formed: {e}"));
        return Ok(vec![wf.finish()]);
    }
    let p_max = state.depth();
    let lac = BigInt::from(state.profile.lacunarity);
    let mut out = vec![wf.finish()];

    for p in 1..=p_max {
        let mut t = Tally::new("lacunarity-3", Some(p), None);
        let base = &lac * state.q(p);
        let (quot, rem) = state.q(p + 1).div_rem(&base);
        t.record_flag(rem.is_zero() && quot >= BigInt::one(), at(p));
        out.push(t.finish());

        let mut t = Tally::new("decay-4", Some(p), None);
        match state.profile.mode {
            DecayMode::Desk => t.waive("DESK mode: decay condition r_k < exp(-q_k) waived"),
            DecayMode::Paper => {
                let (r, q) = (state.r(p), state.q(p));
                let scale = q.bits() + r.bit_size();
                let d = certify(&config.policy, scale, true, |prec| decay_margin(r, q, prec))?;
                t.record(d.status, d.margin, at(p));
            }
        }
        out.push(t.finish());

        let mut t = Tally::new("q-recurrence", Some(p), None);
        t.record_flag(
            state.q(p + 1) == &(&lac * state.q(p) * state.checkpoint(p)),
            at(p),
        );
        out.push(t.finish());

        let mut t = Tally::new("checkpoint-floor", Some(p), None);
        let floor = state.floor(p)?;
        let gap = state.checkpoint(p) - &floor - 1u32;
        t.record_exact(!gap.is_negative(), &Rat::from_integer(gap), at(p));
        out.push(t.finish());

        let mut t = Tally::new("k-index", Some(p), None);
        let k = k_index(&state.q, p);
        t.record_flag(k.as_ref().is_ok_and(|k| k == state.k(p)), at(p));
        out.push(t.finish());

        let mut t = Tally::new("a-interval", Some(p), None);
        let a = interval_a(state.q(p), state.q(p + 1), state.k(p))?;
        t.record_flag(&a == state.interval(p), at(p));
        out.push(t.finish());

        let mut t = Tally::new("nesting", Some(p), None);
        let (lo, hi) = state.interval(p);
        let margin = if p == 1 {
            // against A_0 = (0, 1), modulo 1
            let f = Rat::from_integer(lo.floor());
            let (l, h) = (lo - &f, hi - &f);
            l.min(Rat::one() - h)
        } else {
            let (plo, phi) = state.interval(p - 1);
            (lo - plo).min(phi - hi)
        };
        let holds = if p == 1 {
            margin.is_positive()
        } else {
            !margin.is_negative()
        };
        t.record_exact(holds, &margin, at(p));
        out.push(t.finish());
    }

    // q_n α - k_n in [q_n/q_{n+1}, 2 q_n/q_{n+1}] for n < P, and 0 at n = P.
    let mut t = Tally::new("alpha-residue", None, None);
    t.record_flag(alpha == &state.alpha(), Witness::default());
    for n in 1..=p_max {
        let res =
            alpha * &Rat::from_integer(state.q(n).clone()) - Rat::from_integer(state.k(n).clone());
        if n == p_max {
            t.record_exact(res.is_zero(), &-res.abs(), at(n));
        } else {
            let lo = q_ratio(state, n);
            let hi = &lo * &Rat::from_i64(2);
            let margin = (&res - &lo).min(&hi - &res);
            t.record_exact(!margin.is_negative(), &margin, at(n));
        }
    }
    out.push(t.finish());

    if let Threshold::Deferred { log2_estimate } = state.threshold(p_max) {
        notes.push(format!(
            "M_{p_max} deferred (about 2^{log2_estimate}, beyond the bit budget); it bounds only a level not built"
        ));
    }
    Ok(out)
}

/// Ensures a state can be indexed safely by the numeric suites.
pub(crate) fn require_well_formed(state: &ConstructionState) -> Result<()> {
    well_formed(state).map_err(|e| Error::precondition(format!("malformed state: {e}")))
}

pub(crate) fn short(n: &BigInt) -> String {
    short_int(n)
}
