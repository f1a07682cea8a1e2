//! The exponential sums `Δ_k(N, β)` and the aggregates `S`, `T`, `W`.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arithmetic::{
    cos_pi, sin_cos_pi, sin_cos_pi_frac, sin_pi, ComplexInterval, Dyadic, IntervalReal, Rat,
};
use crate::construction::ConstructionState;
use crate::error::{Error, Result};

/// Largest `N` the literal summation accepts.
pub const DIRECT_LIMIT: u64 = 1_000_000;

/// Default number of uniform grid points for [`w_max`].
pub const DEFAULT_GRID: usize = 256;

/// The exact fractional part `{q β}` in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThetaFraction(Rat);

impl ThetaFraction {
    pub fn new(theta: Rat) -> Result<Self> {
        if theta.is_negative() || theta >= Rat::one() {
            return Err(Error::domain("theta must lie in [0, 1)"));
        }
        Ok(ThetaFraction(theta))
    }

    /// `{q β}`.
    pub fn of(q: &BigInt, beta: &Rat) -> Self {
        ThetaFraction((beta * &Rat::from_integer(q.clone())).frac())
    }

    pub fn value(&self) -> &Rat {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

#[derive(Clone, Debug)]
pub struct ExpSumValue {
    pub value: ComplexInterval,
    pub magnitude: IntervalReal,
    pub theta: ThetaFraction,
    pub n: BigInt,
}

/// Literal `Σ_{n<N} e^{2πi q n β}`; terms repeat with the period of `{qβ}`
/// and are evaluated once per residue.
pub fn delta_direct(q: &BigInt, n: u64, beta: &Rat, prec: u32) -> Result<ComplexInterval> {
    if n > DIRECT_LIMIT {
        return Err(Error::SizeLimit(format!(
            "direct sum with N = {n} > {DIRECT_LIMIT}"
        )));
    }
    let theta = ThetaFraction::of(q, beta);
    let (a, b) = (theta.value().numer().clone(), theta.value().denom().clone());
    let period = b.to_u64().filter(|&b| b <= n.max(1)).unwrap_or(n.max(1));
    let mut memo: Vec<Option<ComplexInterval>> = vec![None; period as usize];
    let p = prec + 2 * (64 - n.leading_zeros()) + 8;
    let mut sum = ComplexInterval::zero(p);
    for j in 0..n {
        let slot = (j % period) as usize;
        if memo[slot].is_none() {
            // angle 2 j a / b, reduced mod 2 exactly
            let num = (BigInt::from(j) * &a * 2u32) % (&b * 2u32);
            let angle = Rat::new(num, b.clone())?;
            let (s, c) = sin_cos_pi(&angle, p);
            memo[slot] = Some(ComplexInterval::new(c, s));
        }
        sum = sum.add(memo[slot].as_ref().expect("filled above"));
    }
    Ok(ComplexInterval::new(
        sum.re.with_precision(prec),
        sum.im.with_precision(prec),
    ))
}

/// Dirichlet-form evaluator for one `θ`; caches `sin(πθ)`.
#[derive(Clone, Debug)]
pub struct Dirichlet {
    theta: ThetaFraction,
    sin_theta: Option<IntervalReal>,
    prec: u32,
}

impl Dirichlet {
    pub fn new(theta: ThetaFraction, prec: u32) -> Self {
        let sin_theta = (!theta.is_zero()).then(|| sin_pi(theta.value(), prec + 8));
        Dirichlet {
            theta,
            sin_theta,
            prec,
        }
    }

    pub fn theta(&self) -> &ThetaFraction {
        &self.theta
    }

    fn ratio(&self, n: &BigInt, s: &IntervalReal) -> IntervalReal {
        let t = self.theta.value();
        sin_cos_pi_frac(&(t.numer() * n), t.denom(), self.prec + 8)
            .0
            .div(s)
            .expect("sin(πθ) > 0 for 0 < θ < 1")
            .with_precision(self.prec)
    }

    /// `|Δ(N)|`.
    pub fn magnitude(&self, n: &BigInt) -> IntervalReal {
        match &self.sin_theta {
            _ if n.is_one() => IntervalReal::one(self.prec),
            None => IntervalReal::from_int(n, self.prec),
            Some(s) => self.ratio(n, s).abs(),
        }
    }

    /// `Δ(N) = e^{iπ(N-1)θ} sin(πNθ) / sin(πθ)`.
    pub fn eval(&self, n: &BigInt) -> ExpSumValue {
        let (value, magnitude) = match &self.sin_theta {
            // a single term e^0, kept exact so tight margins at N = 1 decide
            _ if n.is_one() => {
                let v = IntervalReal::one(self.prec);
                (ComplexInterval::real(v.clone()), v)
            }
            None => {
                let v = IntervalReal::from_int(n, self.prec);
                (ComplexInterval::real(v.clone()), v)
            }
            Some(s) => {
                let d = self.ratio(n, s);
                let t = self.theta.value();
                let (ps, pc) = sin_cos_pi_frac(&(t.numer() * (n - 1u32)), t.denom(), self.prec + 8);
                let value = ComplexInterval::new(pc.mul(&d), ps.mul(&d));
                let value = ComplexInterval::new(
                    value.re.with_precision(self.prec),
                    value.im.with_precision(self.prec),
                );
                (value, d.abs())
            }
        };
        ExpSumValue {
            value,
            magnitude,
            theta: self.theta.clone(),
            n: n.clone(),
        }
    }
}

/// Closed-form `Δ(N)` for `θ = {q β}`; exactly `N` when `θ = 0`.
pub fn delta_closed(theta: &ThetaFraction, n: &BigInt, prec: u32) -> ExpSumValue {
    Dirichlet::new(theta.clone(), prec).eval(n)
}

#[derive(Clone, Debug)]
struct Level {
    q: BigInt,
    r: IntervalReal,
    kernel: Dirichlet,
}

/// Per-level data for evaluating `S^p`, `T^p`, `W` at one `β`.
#[derive(Clone, Debug)]
pub struct SumContext {
    levels: Vec<Level>,
    prec: u32,
}

impl SumContext {
    /// Levels `1..=p` of `state` at rotation `beta`.
    pub fn new(state: &ConstructionState, beta: &Rat, p: usize, prec: u32) -> Self {
        let levels = (1..=p)
            .map(|k| Level {
                q: state.q(k).clone(),
                r: IntervalReal::from_rat(state.r(k), prec),
                kernel: Dirichlet::new(ThetaFraction::of(state.q(k), beta), prec),
            })
            .collect();
        SumContext { levels, prec }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn theta(&self, k: usize) -> &ThetaFraction {
        self.levels[k - 1].kernel.theta()
    }

    pub fn delta(&self, k: usize, n: &BigInt) -> ExpSumValue {
        self.levels[k - 1].kernel.eval(n)
    }

    pub fn magnitude(&self, k: usize, n: &BigInt) -> IntervalReal {
        self.levels[k - 1].kernel.magnitude(n)
    }

    /// `r_k` as an interval.
    pub fn weight(&self, k: usize) -> &IntervalReal {
        &self.levels[k - 1].r
    }

    /// `S^p(N) = Σ r_k Re Δ_k(N)`.
    pub fn s(&self, n: &BigInt) -> IntervalReal {
        self.levels
            .iter()
            .fold(IntervalReal::zero(self.prec), |acc, l| {
                acc.add(&l.r.mul(&l.kernel.eval(n).value.re))
            })
    }

    /// `T^p(N) = Σ r_k |Δ_k(N)|`.
    pub fn t(&self, n: &BigInt) -> IntervalReal {
        self.levels
            .iter()
            .fold(IntervalReal::zero(self.prec), |acc, l| {
                acc.add(&l.r.mul(&l.kernel.magnitude(n)))
            })
    }

    fn phases(&self, x: &Rat) -> Vec<ComplexInterval> {
        self.levels
            .iter()
            .map(|l| {
                let angle = (x * &Rat::from_integer(&l.q * 2u32)).rem_euclid_int(2);
                let (s, c) = sin_cos_pi(&angle, self.prec + 8);
                ComplexInterval::new(c, s)
            })
            .collect()
    }

    fn w_with(&self, phases: &[ComplexInterval], deltas: &[ExpSumValue]) -> IntervalReal {
        self.levels
            .iter()
            .zip(phases.iter().zip(deltas))
            .fold(IntervalReal::zero(self.prec), |acc, (l, (e, d))| {
                acc.add(&l.r.mul(&e.mul(&d.value).re))
            })
            .with_precision(self.prec)
    }

    /// `W(N, x) = Σ r_k Re[e^{2πi q_k x} Δ_k(N)]`.
    pub fn w(&self, x: &Rat, n: &BigInt) -> IntervalReal {
        let deltas: Vec<_> = (1..=self.depth()).map(|k| self.delta(k, n)).collect();
        self.w_with(&self.phases(x), &deltas)
    }

    /// The point `x*` at which level `k`'s term equals `r_k |Δ_k(N)|`:
    /// `x* = -arg Δ_k / (2π q_k) mod 1`, exact since the phase is `π(N-1)θ`
    /// plus `π` when the Dirichlet ratio is negative.
    pub fn aligned_x(&self, k: usize, d: &ExpSumValue) -> Rat {
        let l = &self.levels[k - 1];
        let mut turns = l.kernel.theta().value() * &Rat::from_integer(&d.n - 1u32);
        if !l.kernel.theta().is_zero() {
            let sn = sin_pi(
                &(l.kernel.theta().value() * &Rat::from_integer(d.n.clone())),
                32,
            );
            if sn.is_negative() {
                turns = turns + Rat::one();
            }
        }
        let x = -(turns * Rat::new(BigInt::one(), &l.q * 2u32).expect("positive q"));
        x.frac()
    }

    /// Certified lower bound on `max_x |W(N, x)|` from aligning one level:
    /// `r_k |Δ_k| - Σ_{j≠k} r_j |Δ_j|`, maximized over `k`.
    fn alignment_bound(&self, mags: &[IntervalReal]) -> Dyadic {
        let weighted: Vec<IntervalReal> = self
            .levels
            .iter()
            .zip(mags)
            .map(|(l, m)| l.r.mul(m))
            .collect();
        let total = weighted
            .iter()
            .fold(IntervalReal::zero(self.prec), |acc, w| acc.add(w));
        weighted
            .iter()
            .map(|w| w.sub(&total.sub(w)).lower().clone())
            .max()
            .unwrap_or_else(Dyadic::zero)
    }

    /// Enclosure `[L, U]` of `max_x |W(N, x)|` with `U = T(N).upper` and `L`
    /// the best of the grid values and the alignment bound.
    pub fn w_max(&self, n: &BigInt, grid: &WGrid) -> IntervalReal {
        let deltas: Vec<_> = (1..=self.depth()).map(|k| self.delta(k, n)).collect();
        let mags: Vec<_> = deltas.iter().map(|d| d.magnitude.clone()).collect();
        let upper = self
            .levels
            .iter()
            .zip(&mags)
            .fold(IntervalReal::zero(self.prec), |acc, (l, m)| {
                acc.add(&l.r.mul(m))
            })
            .upper()
            .clone();
        let mut lower = self.alignment_bound(&mags).max(Dyadic::zero());
        let mut consider = |w: IntervalReal| {
            let lo = w.abs().lower().clone();
            if lo > lower {
                lower = lo;
            }
        };
        for phases in &grid.phases {
            consider(self.w_with(phases, &deltas));
        }
        for (k, d) in deltas.iter().enumerate() {
            let x = self.aligned_x(k + 1, d);
            consider(self.w_with(&self.phases(&x), &deltas));
        }
        IntervalReal::new(lower.min(upper.clone()), upper, self.prec)
    }

    /// Uniform grid `j / size` with precomputed phases.
    pub fn grid(&self, size: usize) -> WGrid {
        let points: Vec<Rat> = (0..size)
            .map(|j| Rat::ratio(j as i64, size as i64))
            .collect();
        let phases = points.iter().map(|x| self.phases(x)).collect();
        WGrid { points, phases }
    }
}

/// Sample points for the lower bound in [`SumContext::w_max`].
#[derive(Clone, Debug)]
pub struct WGrid {
    pub points: Vec<Rat>,
    phases: Vec<Vec<ComplexInterval>>,
}

/// `S(N, β) = Σ_{k<=P} r_k Re Δ_k(N, β)`.
pub fn s_sum(state: &ConstructionState, beta: &Rat, n: &BigInt, prec: u32) -> IntervalReal {
    SumContext::new(state, beta, state.depth(), prec).s(n)
}

/// `T(N, β) = Σ_{k<=P} r_k |Δ_k(N, β)|`.
pub fn t_sum(state: &ConstructionState, beta: &Rat, n: &BigInt, prec: u32) -> IntervalReal {
    SumContext::new(state, beta, state.depth(), prec).t(n)
}

/// `W(N, x, β)` in spectral form.
pub fn w_sum(
    state: &ConstructionState,
    beta: &Rat,
    x: &Rat,
    n: &BigInt,
    prec: u32,
) -> Result<IntervalReal> {
    if x.is_negative() || *x >= Rat::one() {
        return Err(Error::domain("x must lie in [0, 1)"));
    }
    Ok(SumContext::new(state, beta, state.depth(), prec).w(x, n))
}

/// Enclosure of `max_x |W(N, x, β)|` using `grid` uniform points.
pub fn w_max(
    state: &ConstructionState,
    beta: &Rat,
    n: &BigInt,
    prec: u32,
    grid: usize,
) -> Result<IntervalReal> {
    if grid < 4 {
        return Err(Error::precondition(
            "W_max needs a grid of at least 4 points",
        ));
    }
    let ctx = SumContext::new(state, beta, state.depth(), prec);
    Ok(ctx.w_max(n, &ctx.grid(grid)))
}

/// `cos(2π q x)`, shared with the dynamics.
pub(crate) fn cos_2pi(q: &BigInt, x: &Rat, prec: u32) -> IntervalReal {
    cos_pi(&(x * &Rat::from_integer(q * 2u32)).rem_euclid_int(2), prec)
}

/// `sin(2π q x)`.
pub(crate) fn sin_2pi(q: &BigInt, x: &Rat, prec: u32) -> IntervalReal {
    sin_pi(&(x * &Rat::from_integer(q * 2u32)).rem_euclid_int(2), prec)
}
