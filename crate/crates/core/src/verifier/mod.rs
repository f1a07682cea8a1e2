//! Every inequality of the construction as a named, certified check.

mod checks;
mod mutation;
mod schedule;
mod structure;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::arithmetic::{
    certify, decide, format_interval, IntervalReal, PrecisionPolicy, Rat, Status, DEFAULT_DIGITS,
};
use crate::construction::{ConstantsProfile, ConstructionState};
use crate::error::Result;

pub use checks::{claim_samples, verify_claim, verify_final, verify_induction, BetaSample};
pub use mutation::Mutation;
pub use schedule::{log_spaced, Schedule};
pub use structure::{verify_structure, well_formed};

/// Knobs for a verification pass.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub schedule: Schedule,
    pub grid: usize,
    pub seed: u64,
    /// Interior `β` samples per interval, for checks not monotone in `θ`.
    pub interior_samples: usize,
    pub policy: PrecisionPolicy,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            schedule: Schedule::default(),
            grid: crate::sums::DEFAULT_GRID,
            seed: 0,
            interior_samples: 8,
            policy: PrecisionPolicy::new(128, 1024),
        }
    }
}

impl VerifyConfig {
    /// A light schedule for negative controls and smoke tests.
    pub fn quick() -> Self {
        VerifyConfig {
            schedule: Schedule {
                dense_to: 100,
                log_samples: 8,
                include_checkpoints: true,
            },
            grid: 16,
            interior_samples: 2,
            ..VerifyConfig::default()
        }
    }
}

/// One instance identifier: level, `N`, `β`, `x`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    pub status: Status,
    /// Worst certified slack (right side minus left side), as decimal bounds.
    pub margin_lo: Option<String>,
    pub margin_hi: Option<String>,
    /// The worst instance first, then up to three failing ones.
    pub witnesses: Vec<Witness>,
    pub instances: u64,
    /// Excluded from the overall verdict (decay condition in DESK mode).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub waived: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    fn key(&self) -> (&str, Option<usize>, Option<&str>) {
        (&self.name, self.level, self.beta.as_deref())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub state_digest: String,
    pub profile: ConstantsProfile,
    /// `N_P`, the largest `N` the truncated construction speaks for.
    pub horizon: String,
    pub c: Rat,
    pub alpha: Rat,
    pub status: Status,
    pub schedule: Schedule,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn check(&self, name: &str) -> impl Iterator<Item = &CheckResult> {
        let name = name.to_string();
        self.checks.iter().filter(move |c| c.name == name)
    }

    /// Combined status of every result with this name.
    pub fn status_of(&self, name: &str) -> Option<Status> {
        self.check(name).map(|c| c.status).reduce(Status::and)
    }

    pub fn failing(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks
            .iter()
            .filter(|c| !c.waived && c.status != Status::Pass)
    }
}

/// Aggregates instances of one check into a [`CheckResult`].
pub(crate) struct Tally {
    name: &'static str,
    level: Option<usize>,
    beta: Option<String>,
    status: Status,
    worst: Option<(Status, IntervalReal, Witness)>,
    failing: Vec<Witness>,
    instances: u64,
    note: Option<String>,
    waived: bool,
}

fn severity(s: Status) -> u8 {
    match s {
        Status::Fail => 2,
        Status::Indeterminate => 1,
        Status::Pass => 0,
    }
}

impl Tally {
    pub(crate) fn new(name: &'static str, level: Option<usize>, beta: Option<String>) -> Self {
        Tally {
            name,
            level,
            beta,
            status: Status::Pass,
            worst: None,
            failing: Vec::new(),
            instances: 0,
            note: None,
            waived: false,
        }
    }

    pub(crate) fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub(crate) fn waive(&mut self, note: impl Into<String>) {
        self.waived = true;
        self.note = Some(note.into());
    }

    pub(crate) fn record(&mut self, status: Status, margin: IntervalReal, witness: Witness) {
        self.instances += 1;
        self.status = self.status.and(status);
        if status != Status::Pass && self.failing.len() < 3 {
            self.failing.push(witness.clone());
        }
        let replace = match &self.worst {
            None => true,
            Some((s, m, _)) => match severity(status).cmp(&severity(*s)) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => margin.lower() < m.lower(),
            },
        };
        if replace {
            self.worst = Some((status, margin, witness));
        }
    }

    /// An exactly decided instance.
    pub(crate) fn record_exact(&mut self, holds: bool, margin: &Rat, witness: Witness) {
        let status = if holds { Status::Pass } else { Status::Fail };
        self.record(status, IntervalReal::from_rat(margin, 64), witness);
    }

    /// A structural failure with no numeric margin.
    pub(crate) fn record_flag(&mut self, holds: bool, witness: Witness) {
        self.instances += 1;
        if !holds {
            self.status = Status::Fail;
            if self.failing.len() < 3 {
                self.failing.push(witness);
            }
        }
    }

    pub(crate) fn finish(self) -> CheckResult {
        let (margin_lo, margin_hi, mut witnesses) = match self.worst {
            Some((_, m, w)) => {
                let (lo, hi) = format_interval(&m, DEFAULT_DIGITS);
                (Some(lo), Some(hi), vec![w])
            }
            None => (None, None, Vec::new()),
        };
        for w in self.failing {
            if !witnesses.contains(&w) {
                witnesses.push(w);
            }
        }
        CheckResult {
            name: self.name.to_string(),
            level: self.level,
            beta: self.beta,
            status: self.status,
            margin_lo,
            margin_hi,
            witnesses,
            instances: self.instances,
            waived: self.waived,
            note: self.note,
        }
    }
}

/// Decides a margin computed at base precision, re-deriving it at higher
/// precision only if the sign is not yet certain.
pub(crate) fn settle<F>(
    policy: &PrecisionPolicy,
    fast: IntervalReal,
    strict: bool,
    scale_bits: u64,
    slow: F,
) -> Result<(Status, IntervalReal)>
where
    F: FnMut(u32) -> Result<IntervalReal>,
{
    let status = decide(&fast, strict);
    if status != Status::Indeterminate {
        return Ok((status, fast));
    }
    let next = PrecisionPolicy::new(
        fast.precision().saturating_mul(2).max(policy.start),
        policy.max,
    );
    let d = certify(&next, scale_bits, strict, slow)?;
    Ok((d.status, d.margin))
}

/// Runs the structural, claim, induction and final suites.
pub fn verify_all(
    state: &ConstructionState,
    alpha: &Rat,
    c: &Rat,
    config: &VerifyConfig,
) -> Result<Certificate> {
    let mut notes = Vec::new();
    let mut checks = verify_structure(state, alpha, config, &mut notes)?;
    let well_formed = checks
        .iter()
        .all(|c| c.name != "well-formed" || c.status == Status::Pass);
    if well_formed {
        let groups: Vec<Result<Vec<CheckResult>>> = {
            use rayon::prelude::*;
            let tasks: Vec<Box<dyn Fn() -> Result<Vec<CheckResult>> + Sync>> = vec![
                Box::new(|| {
                    let mut v = Vec::new();
                    for n in 1..=state.depth() {
                        v.extend(verify_claim(
                            state,
                            n,
                            &claim_samples(state, n, config),
                            config,
                        )?);
                    }
                    Ok(v)
                }),
                Box::new(|| verify_induction(state, alpha, config)),
                Box::new(|| verify_final(state, alpha, c, config)),
            ];
            tasks.par_iter().map(|t| t()).collect()
        };
        for g in groups {
            checks.extend(g?);
        }
        notes.extend(checks::standing_notes(state, config));
    } else {
        notes.push("state is malformed; numeric suites skipped".into());
    }
    checks.sort_by(|a, b| a.key().cmp(&b.key()));
    let status = checks
        .iter()
        .filter(|c| !c.waived)
        .fold(Status::Pass, |acc, c| acc.and(c.status));
    Ok(Certificate {
        state_digest: state.digest(),
        profile: state.profile.clone(),
        // a malformed state may lack N_P
        horizon: state
            .n
            .get(state.depth())
            .map_or_else(|| "undefined".into(), |n| n.to_string()),
        c: c.clone(),
        alpha: alpha.clone(),
        status,
        schedule: config.schedule.clone(),
        seed: config.seed,
        checks,
        notes,
    })
}
