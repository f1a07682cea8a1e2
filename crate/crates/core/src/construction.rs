//! The inductive choice of frequencies `q_k`, weights `r_k`, checkpoints `N_p`,
//! thresholds `M_p` and the nested rotation intervals `A_p`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arithmetic::{ceil_log2, decay_exponent, PrecisionPolicy, Rat};
use crate::error::{Error, Result};
use crate::phi::GrowthFunction;

/// Whether the decay condition `r_k < exp(-q_k)` is enforced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DecayMode {
    Paper,
    /// Decay cap disabled; everything else identical.
    Desk,
}

impl fmt::Display for DecayMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecayMode::Paper => "PAPER",
            DecayMode::Desk => "DESK",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstantsProfile {
    /// `Λ`: `q_{k+1} = Λ q_k N_k`.
    pub lacunarity: u32,
    pub mode: DecayMode,
    /// Largest integer, in bits, the construction may materialize.
    pub bit_budget: u64,
}

pub const DEFAULT_BIT_BUDGET: u64 = 1 << 20;

impl ConstantsProfile {
    pub fn paper() -> Self {
        ConstantsProfile {
            lacunarity: 100,
            mode: DecayMode::Paper,
            bit_budget: DEFAULT_BIT_BUDGET,
        }
    }

    pub fn desk() -> Self {
        ConstantsProfile {
            mode: DecayMode::Desk,
            ..ConstantsProfile::paper()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lacunarity == 0 {
            return Err(Error::domain("lacunarity must be positive"));
        }
        if self.mode == DecayMode::Paper && self.lacunarity < 100 {
            return Err(Error::domain("PAPER mode needs lacunarity >= 100"));
        }
        Ok(())
    }
}

/// `M_p`, or a note that it was too large to materialize. Only the last
/// threshold of a run can be deferred: the next step would need it as a floor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Threshold {
    Exact(BigInt),
    Deferred { log2_estimate: u64 },
}

impl Threshold {
    pub fn exact(&self) -> Option<&BigInt> {
        match self {
            Threshold::Exact(m) => Some(m),
            Threshold::Deferred { .. } => None,
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Exact(m) => write!(f, "{m}"),
            Threshold::Deferred { log2_estimate } => write!(f, "deferred:2^{log2_estimate}"),
        }
    }
}

/// Parameters after `depth` induction steps. Indices follow the induction:
/// `q(1..=depth+1)`, `r(1..=depth)`, `n(0..=depth)`, `m(0..=depth)`,
/// `k(1..=depth)`, `a(1..=depth)`.
///
/// Deserialization performs no validation; the verifier decides whether a
/// state is sound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "StateDoc", into = "StateDoc")]
pub struct ConstructionState {
    pub phi: GrowthFunction,
    pub profile: ConstantsProfile,
    pub q: Vec<BigInt>,
    pub r: Vec<Rat>,
    pub n: Vec<BigInt>,
    pub m: Vec<Threshold>,
    pub k: Vec<BigInt>,
    pub a: Vec<(Rat, Rat)>,
}

impl ConstructionState {
    /// Depth 0: `q_1 = 1`, `N_0 = M_0 = 1`.
    pub fn initial(phi: GrowthFunction, profile: ConstantsProfile) -> Self {
        ConstructionState {
            phi,
            profile,
            q: vec![BigInt::one()],
            r: Vec::new(),
            n: vec![BigInt::one()],
            m: vec![Threshold::Exact(BigInt::one())],
            k: Vec::new(),
            a: Vec::new(),
        }
    }

    pub fn depth(&self) -> usize {
        self.r.len()
    }

    pub fn q(&self, i: usize) -> &BigInt {
        &self.q[i - 1]
    }

    pub fn r(&self, i: usize) -> &Rat {
        &self.r[i - 1]
    }

    pub fn checkpoint(&self, j: usize) -> &BigInt {
        &self.n[j]
    }

    pub fn threshold(&self, j: usize) -> &Threshold {
        &self.m[j]
    }

    pub fn k(&self, i: usize) -> &BigInt {
        &self.k[i - 1]
    }

    pub fn interval(&self, i: usize) -> &(Rat, Rat) {
        &self.a[i - 1]
    }

    /// `max(M_{p-1}, N_{p-1})`, the floor for step `p`.
    pub fn floor(&self, p: usize) -> Result<BigInt> {
        let n = self.checkpoint(p - 1);
        match self.threshold(p - 1) {
            Threshold::Exact(m) => Ok(m.max(n).clone()),
            Threshold::Deferred { log2_estimate } => Err(Error::overflow(
                format!("M_{}", p - 1),
                format!(
                    "threshold of about 2^{log2_estimate} exceeds the bit budget of {} bits",
                    self.profile.bit_budget
                ),
            )),
        }
    }

    /// Verification horizon `N_P`.
    pub fn horizon(&self) -> &BigInt {
        self.checkpoint(self.depth())
    }

    /// The truncated rotation number `Σ_{k<=P} 1/q_k = k_P / q_P`.
    pub fn alpha(&self) -> Rat {
        let p = self.depth();
        if p == 0 {
            return Rat::zero();
        }
        (1..=p).fold(Rat::zero(), |acc, i| {
            acc + Rat::new(BigInt::one(), self.q(i).clone()).expect("positive q")
        })
    }

    /// `B_p = Σ_{n<=p} r_n q_{n+1} / q_n`, a uniform bound for `T^p`.
    pub fn uniform_t_bound(&self, p: usize) -> Rat {
        (1..=p).fold(Rat::zero(), |acc, i| {
            let ratio = Rat::new(self.q(i + 1).clone(), self.q(i).clone()).expect("positive q");
            acc + self.r(i) * &ratio
        })
    }

    /// SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("state serializes");
        let hash = Sha256::digest(json.as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct StateDoc {
    phi: GrowthFunction,
    profile: ConstantsProfile,
    depth: usize,
    q: Vec<String>,
    r: Vec<String>,
    #[serde(rename = "N")]
    n: Vec<String>,
    #[serde(rename = "M")]
    m: Vec<String>,
    k: Vec<String>,
    #[serde(rename = "A")]
    a: Vec<[Rat; 2]>,
}

fn dyadic_string(r: &Rat) -> String {
    match r.as_pow2() {
        Some(e) => format!("2^{e}"),
        None => r.to_string(),
    }
}

fn parse_int(s: &str, what: &str) -> Result<BigInt> {
    s.parse()
        .map_err(|_| Error::parse(format!("{what}: `{}` is not an integer", short_str(s))))
}

fn short_str(s: &str) -> &str {
    &s[..s.len().min(40)]
}

impl From<ConstructionState> for StateDoc {
    fn from(s: ConstructionState) -> Self {
        StateDoc {
            depth: s.depth(),
            q: s.q.iter().map(|x| x.to_string()).collect(),
            r: s.r.iter().map(dyadic_string).collect(),
            n: s.n.iter().map(|x| x.to_string()).collect(),
            m: s.m.iter().map(|x| x.to_string()).collect(),
            k: s.k.iter().map(|x| x.to_string()).collect(),
            a: s.a.into_iter().map(|(lo, hi)| [lo, hi]).collect(),
            phi: s.phi,
            profile: s.profile,
        }
    }
}

impl TryFrom<StateDoc> for ConstructionState {
    type Error = Error;

    fn try_from(d: StateDoc) -> Result<Self> {
        let p = d.depth;
        let lens = [
            ("q", d.q.len(), p + 1),
            ("r", d.r.len(), p),
            ("N", d.n.len(), p + 1),
            ("M", d.m.len(), p + 1),
            ("k", d.k.len(), p),
            ("A", d.a.len(), p),
        ];
        for (name, got, want) in lens {
            if got != want {
                return Err(Error::parse(format!(
                    "{name} has {got} entries, depth {p} needs {want}"
                )));
            }
        }
        let ints = |v: &[String], what: &str| {
            v.iter()
                .map(|s| parse_int(s, what))
                .collect::<Result<Vec<_>>>()
        };
        let m =
            d.m.iter()
                .map(|s| match s.strip_prefix("deferred:2^") {
                    Some(e) => e
                        .parse()
                        .map(|log2_estimate| Threshold::Deferred { log2_estimate })
                        .map_err(|_| Error::parse(format!("bad deferred threshold `{s}`"))),
                    None => parse_int(s, "M").map(Threshold::Exact),
                })
                .collect::<Result<Vec<_>>>()?;
        Ok(ConstructionState {
            phi: d.phi,
            profile: d.profile,
            q: ints(&d.q, "q")?,
            r: d.r
                .iter()
                .map(|s| s.parse())
                .collect::<Result<Vec<Rat>>>()?,
            n: ints(&d.n, "N")?,
            m,
            k: ints(&d.k, "k")?,
            a: d.a.into_iter().map(|[lo, hi]| (lo, hi)).collect(),
        })
    }
}

/// `k_n = Σ_{s<=n} q_n / q_s` for 1-based `n`; `q[0]` is `q_1`.
pub fn k_index(q: &[BigInt], n: usize) -> Result<BigInt> {
    if n == 0 || n > q.len() {
        return Err(Error::precondition(format!(
            "k_index needs 1 <= n <= {}",
            q.len()
        )));
    }
    let qn = &q[n - 1];
    let mut k = BigInt::zero();
    for (s, qs) in q[..n].iter().enumerate() {
        if !qs.is_positive() {
            return Err(Error::precondition(format!("q_{} is not positive", s + 1)));
        }
        let (quot, rem) = qn.div_rem(qs);
        if !rem.is_zero() {
            return Err(Error::precondition(format!(
                "q_{} does not divide q_{n}",
                s + 1
            )));
        }
        k += quot;
    }
    Ok(k)
}

/// `A_n = [(k q' + q) / (q q'), (k q' + 2q) / (q q')]` for `q = q_n`, `q' = q_{n+1}`.
pub fn interval_a(q_n: &BigInt, q_next: &BigInt, k_n: &BigInt) -> Result<(Rat, Rat)> {
    let den = q_n * q_next;
    let base = k_n * q_next;
    Ok((
        Rat::new(&base + q_n, den.clone())?,
        Rat::new(base + q_n * 2u32, den)?,
    ))
}

/// Largest `r_p = 2^-e` meeting the step-`p` constraints, where `p` is the
/// next step of `state`:
/// (a) `2 r K <= 2^{-p-1}` for `K = max(M_{p-1}, N_{p-1})`,
/// (b) `r N <= φ(N)` for `N <= K`, implied by (a) since `φ >= 2` there,
/// (c) in PAPER mode, `r < exp(-q_p)`.
pub fn choose_r(state: &ConstructionState) -> Result<Rat> {
    let p = state.depth() + 1;
    let budget = state.profile.bit_budget;
    let mut e = BigInt::zero();
    if state.profile.mode == DecayMode::Paper {
        let q = state.q(p);
        if q.bits() > budget {
            return Err(Error::overflow(
                format!("r_{p}"),
                format!(
                    "decay condition r_{p} < exp(-q_{p}) needs a dyadic 2^-e with e > q_{p}/ln 2, \
                     about 2^{} bits, beyond the bit budget of {budget} bits",
                    q.bits()
                ),
            ));
        }
        e = decay_exponent(q)?;
        if e.bits() > 63 || e > BigInt::from(budget) {
            return Err(Error::overflow(
                format!("r_{p}"),
                format!(
                    "decay condition r_{p} < exp(-q_{p}) needs a dyadic 2^-e with e >= {}, \
                     a denominator of that many bits, beyond the bit budget of {budget} bits",
                    short_int(&e)
                ),
            ));
        }
    }
    let k = state.floor(p)?;
    let k_bits = ceil_log2(k.magnitude());
    let e_a = BigInt::from(p as u64 + 2 + k_bits);
    if e_a > e {
        e = e_a;
    }
    let e = e.to_u64().filter(|&e| e <= budget).ok_or_else(|| {
        Error::overflow(
            format!("r_{p}"),
            format!(
                "exponent {} exceeds the bit budget of {budget} bits",
                short_int(&e)
            ),
        )
    })?;
    let r = Rat::pow2(-(e as i64));
    // (b) by monotonicity: r K <= 2^{-p-2} < 2 <= φ(1) <= φ(N).
    debug_assert!(&r * &Rat::from_integer(k) < Rat::from_i64(2));
    Ok(r)
}

/// One induction step: `r_p`, `N_p`, `q_{p+1}`, `k_p`, `A_p`, `M_p`.
pub fn extend(state: &ConstructionState, policy: &PrecisionPolicy) -> Result<ConstructionState> {
    let p = state.depth() + 1;
    let budget = state.profile.bit_budget;
    let r = choose_r(state)?;
    let floor = state.floor(p)?;
    let n_p = state.phi.first_crossing(&r, &floor, policy)?;
    let q_next = state.q(p) * state.profile.lacunarity * &n_p;
    if q_next.bits() > budget {
        return Err(Error::overflow(
            format!("q_{}", p + 1),
            format!(
                "{} bits exceed the bit budget of {budget} bits",
                q_next.bits()
            ),
        ));
    }
    let mut next = state.clone();
    next.r.push(r);
    next.n.push(n_p);
    next.q.push(q_next);
    let k_p = k_index(&next.q, p)?;
    next.a.push(interval_a(next.q(p), next.q(p + 1), &k_p)?);
    next.k.push(k_p);
    let y = next.uniform_t_bound(p) * Rat::from_i64(100);
    let estimate = next.phi.threshold_bits_estimate(&y);
    let m_p = if estimate > budget as f64 {
        Threshold::Deferred {
            log2_estimate: estimate.ceil() as u64,
        }
    } else {
        Threshold::Exact(next.phi.inverse_threshold(&y, policy)?)
    };
    next.m.push(m_p);
    Ok(next)
}

/// Exact record of where `α` sits relative to each `A_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaCertificate {
    pub alpha: Rat,
    /// `q_n α - k_n` for `n = 1..=P`.
    pub residues: Vec<Rat>,
    /// Bound on `Σ_{s>P} 1/q_s` for any continuation obeying the lacunarity.
    pub tail_bound: Rat,
}

impl AlphaCertificate {
    pub fn new(state: &ConstructionState) -> Result<Self> {
        let p = state.depth();
        if p == 0 {
            return Err(Error::precondition("alpha needs depth >= 1"));
        }
        let alpha = state.alpha();
        let residues = (1..=p)
            .map(|n| {
                &alpha * &Rat::from_integer(state.q(n).clone())
                    - Rat::from_integer(state.k(n).clone())
            })
            .collect();
        let lac = state.profile.lacunarity as i64;
        let tail_bound = if lac > 1 {
            Rat::new(BigInt::from(lac), state.q(p + 1) * (lac - 1))?
        } else {
            Rat::one()
        };
        Ok(AlphaCertificate {
            alpha,
            residues,
            tail_bound,
        })
    }

    /// Whether `residue[n]` lies in `[q_n/q_{n+1}, 2 q_n/q_{n+1}]` for `n < P`
    /// and vanishes at `n = P`.
    pub fn holds(&self, state: &ConstructionState) -> bool {
        let p = state.depth();
        self.residues.iter().enumerate().all(|(i, res)| {
            let n = i + 1;
            if n == p {
                return res.is_zero();
            }
            let lo = Rat::new(state.q(n).clone(), state.q(n + 1).clone()).expect("positive q");
            let hi = &lo * &Rat::from_i64(2);
            lo <= *res && *res <= hi
        })
    }
}

/// Runs `depth` induction steps from the initial state.
pub fn build(
    phi: &GrowthFunction,
    depth: usize,
    profile: &ConstantsProfile,
    policy: &PrecisionPolicy,
) -> Result<(ConstructionState, AlphaCertificate)> {
    if depth == 0 {
        return Err(Error::precondition("depth must be at least 1"));
    }
    profile.validate()?;
    let mut state = ConstructionState::initial(phi.clone(), profile.clone());
    for _ in 0..depth {
        state = extend(&state, policy)?;
    }
    let cert = AlphaCertificate::new(&state)?;
    Ok((state, cert))
}

pub(crate) fn short_int(n: &BigInt) -> String {
    let s = n.to_string();
    if s.len() <= 24 {
        s
    } else {
        format!(
            "{}...({} digits)",
            &s[..12],
            s.trim_start_matches('-').len()
        )
    }
}
