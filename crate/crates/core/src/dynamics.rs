//! The skew map `f(x, y) = ({x + α}, {y + c F(x)})`, its Jacobian cocycle and
//! the growth sequence `Γ_N`.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arithmetic::{pi, IntervalReal, Rat};
use crate::construction::ConstructionState;
use crate::error::{Error, Result};
use crate::sums::{cos_2pi, sin_2pi, SumContext, WGrid};

/// Largest orbit length [`orbit_cocycle`] will walk.
pub const ORBIT_LIMIT: u64 = 10_000;

/// A point of `[0,1) × [0,1)` with exact coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusPoint {
    pub x: Rat,
    pub y: Rat,
}

impl TorusPoint {
    pub fn new(x: Rat, y: Rat) -> Result<Self> {
        let unit = |v: &Rat| !v.is_negative() && *v < Rat::one();
        if !unit(&x) || !unit(&y) {
            return Err(Error::domain("torus coordinates must lie in [0, 1)"));
        }
        Ok(TorusPoint { x, y })
    }
}

/// An image point: `x` stays exact, `y` is an enclosure (lifted so that its
/// lower end lies in `[0, 1)`).
#[derive(Clone, Debug)]
pub struct TorusImage {
    pub x: Rat,
    pub y: IntervalReal,
}

impl TorusImage {
    pub fn from_point(p: &TorusPoint, prec: u32) -> Self {
        TorusImage {
            x: p.x.clone(),
            y: IntervalReal::from_rat(&p.y, prec),
        }
    }
}

/// `[[1, 0], [w, 1]]`; determinant one by shape.
#[derive(Clone, Debug)]
pub struct UnipotentJacobian {
    pub w: IntervalReal,
}

impl UnipotentJacobian {
    /// Product of two unipotent factors: the lower-left entries add.
    pub fn compose(&self, other: &UnipotentJacobian) -> UnipotentJacobian {
        UnipotentJacobian {
            w: self.w.add(&other.w),
        }
    }

    /// Spectral norm.
    pub fn norm(&self) -> IntervalReal {
        sigma(&self.w)
    }
}

/// `F(x) = Σ r_k sin(2π q_k x) / (2π q_k)`.
pub fn f_eval(state: &ConstructionState, x: &Rat, prec: u32) -> IntervalReal {
    let p = prec + 8;
    let two_pi = pi(p).mul_pow2(1);
    (1..=state.depth())
        .fold(IntervalReal::zero(p), |acc, k| {
            let denom = two_pi.mul(&IntervalReal::from_int(state.q(k), p));
            let term = sin_2pi(state.q(k), x, p)
                .mul(&IntervalReal::from_rat(state.r(k), p))
                .div(&denom)
                .expect("2π q_k > 0");
            acc.add(&term)
        })
        .with_precision(prec)
}

/// `F'(x) = Σ r_k cos(2π q_k x)`.
pub fn fprime_eval(state: &ConstructionState, x: &Rat, prec: u32) -> IntervalReal {
    let p = prec + 8;
    (1..=state.depth())
        .fold(IntervalReal::zero(p), |acc, k| {
            acc.add(&cos_2pi(state.q(k), x, p).mul(&IntervalReal::from_rat(state.r(k), p)))
        })
        .with_precision(prec)
}

/// `f(x, y) = ({x + α}, {y + c F(x)})`.
pub fn apply_f(
    state: &ConstructionState,
    c: &Rat,
    alpha: &Rat,
    pt: &TorusImage,
    prec: u32,
) -> TorusImage {
    let shift = f_eval(state, &pt.x, prec).mul_rat(c);
    TorusImage {
        x: (&pt.x + alpha).frac(),
        y: pt.y.add(&shift).reduce_mod_one(),
    }
}

/// `f^{-1}(x, y) = ({x - α}, {y - c F(x - α)})`.
pub fn apply_f_inv(
    state: &ConstructionState,
    c: &Rat,
    alpha: &Rat,
    pt: &TorusImage,
    prec: u32,
) -> TorusImage {
    let x = (&pt.x - alpha).frac();
    let shift = f_eval(state, &x, prec).mul_rat(c);
    TorusImage {
        y: pt.y.sub(&shift).reduce_mod_one(),
        x,
    }
}

/// `d_x f^N` by the chain rule: `w = c Σ_{n<N} F'({x + nα})`.
pub fn orbit_cocycle(
    state: &ConstructionState,
    c: &Rat,
    alpha: &Rat,
    x: &Rat,
    n: u64,
    prec: u32,
) -> Result<UnipotentJacobian> {
    if n > ORBIT_LIMIT {
        return Err(Error::SizeLimit(format!(
            "orbit of length {n} > {ORBIT_LIMIT}"
        )));
    }
    let p = prec + 2 * (64 - n.leading_zeros()) + 8;
    let mut sum = IntervalReal::zero(p);
    let mut xn = x.frac();
    for _ in 0..n {
        sum = sum.add(&fprime_eval(state, &xn, p));
        xn = (&xn + alpha).frac();
    }
    Ok(UnipotentJacobian {
        w: sum.mul_rat(c).with_precision(prec),
    })
}

/// `d_x f^{-N}` by the chain rule: `w = -c Σ_{1<=n<=N} F'({x - nα})`.
pub fn orbit_cocycle_inverse(
    state: &ConstructionState,
    c: &Rat,
    alpha: &Rat,
    x: &Rat,
    n: u64,
    prec: u32,
) -> Result<UnipotentJacobian> {
    let start = (x - &(alpha * &Rat::from_i64(n as i64))).frac();
    let forward = orbit_cocycle(state, c, alpha, &start, n, prec)?;
    Ok(UnipotentJacobian { w: forward.w.neg() })
}

/// Largest singular value of `[[1, 0], [w, 1]]`: `(|w| + sqrt(w² + 4)) / 2`.
pub fn sigma(w: &IntervalReal) -> IntervalReal {
    let p = w.precision();
    let a = w.abs();
    let root = a
        .square()
        .add(&IntervalReal::from_int(&BigInt::from(4), p))
        .sqrt()
        .expect("positive");
    a.add(&root).mul_pow2(-1)
}

/// One row of the growth table.
#[derive(Clone, Debug)]
pub struct GrowthRecord {
    pub n: BigInt,
    pub phi_n: IntervalReal,
    pub s: IntervalReal,
    pub t: IntervalReal,
    pub wmax: IntervalReal,
    pub gamma: IntervalReal,
}

/// Evaluates growth records at one `(c, α)` with shared per-level data.
pub struct GrowthEvaluator<'a> {
    state: &'a ConstructionState,
    c: Rat,
    ctx: SumContext,
    grid: WGrid,
}

impl<'a> GrowthEvaluator<'a> {
    pub fn new(
        state: &'a ConstructionState,
        c: &Rat,
        alpha: &Rat,
        prec: u32,
        grid: usize,
    ) -> Result<Self> {
        if grid < 4 {
            return Err(Error::precondition(
                "W_max needs a grid of at least 4 points",
            ));
        }
        let ctx = SumContext::new(state, alpha, state.depth(), prec);
        let grid = ctx.grid(grid);
        Ok(GrowthEvaluator {
            state,
            c: c.clone(),
            ctx,
            grid,
        })
    }

    pub fn context(&self) -> &SumContext {
        &self.ctx
    }

    /// `Γ_N = σ(c W_max(N))`; forward and backward maxima agree because
    /// `x ↦ x - Nα` permutes the circle and `σ` sees only `|w|`.
    pub fn record(&self, n: &BigInt) -> Result<GrowthRecord> {
        if n < &BigInt::one() {
            return Err(Error::precondition("growth records need N >= 1"));
        }
        let prec = self.ctx.precision();
        let wmax = self.ctx.w_max(n, &self.grid);
        let scaled = wmax.mul_rat(&self.c.abs());
        let gamma = IntervalReal::new(
            sigma(&IntervalReal::point(scaled.lower().clone(), prec))
                .lower()
                .clone(),
            sigma(&IntervalReal::point(scaled.upper().clone(), prec))
                .upper()
                .clone(),
            prec,
        );
        Ok(GrowthRecord {
            n: n.clone(),
            phi_n: self.state.phi.eval_int(n, prec)?,
            s: self.ctx.s(n),
            t: self.ctx.t(n),
            wmax,
            gamma,
        })
    }
}

/// Growth record at a single `N`.
pub fn gamma(
    state: &ConstructionState,
    c: &Rat,
    alpha: &Rat,
    n: &BigInt,
    prec: u32,
    grid: usize,
) -> Result<GrowthRecord> {
    GrowthEvaluator::new(state, c, alpha, prec, grid)?.record(n)
}

/// The scaling `c = 1/400`: with `T <= 200 φ` and `σ(w) <= |w| + 1` it gives
/// `Γ_N <= φ(N)/2 + 1 <= φ(N)` once `φ >= 2`.
pub fn choose_c(_state: &ConstructionState) -> Rat {
    Rat::ratio(1, 400)
}
