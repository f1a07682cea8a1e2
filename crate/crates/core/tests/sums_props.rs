use std::time::Instant;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slowtorus_core::arithmetic::Dyadic;
use slowtorus_core::{
    build, delta_closed, delta_direct, s_sum, t_sum, ConstantsProfile, IntervalReal,
    PrecisionPolicy, Rat, ThetaFraction,
};

fn tiny() -> Dyadic {
    // 10^-12 > 2^-40
    Dyadic::pow2(-40)
}

#[test]
fn closed_form_agrees_with_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let start = Instant::now();
    for case in 0..200 {
        let q = BigInt::from(rng.gen_range(1u64..=50));
        let n = rng.gen_range(1u64..=1000);
        let den = rng.gen_range(1i64..=10_000);
        let beta = Rat::ratio(rng.gen_range(0..3 * den), den);
        let direct = delta_direct(&q, n, &beta, 128).unwrap();
        let closed = delta_closed(&ThetaFraction::of(&q, &beta), &BigInt::from(n), 128);
        assert!(
            direct.intersects(&closed.value),
            "case {case}: q={q} N={n} β={beta}"
        );
        for iv in [&direct.re, &direct.im, &closed.value.re, &closed.value.im] {
            assert!(iv.width() < tiny(), "case {case}: width {:?}", iv.width());
        }
    }
    assert!(start.elapsed().as_secs() < 10, "took {:?}", start.elapsed());
}

/// Plain floating-point geometric sum, independent of the interval code.
fn float_delta(q: u64, n: u64, beta: f64) -> (f64, f64) {
    let t = std::f64::consts::TAU * ((q as f64 * beta).fract());
    (0..n).fold((0.0, 0.0), |(re, im), k| {
        let a = t * k as f64;
        (re + a.cos(), im + a.sin())
    })
}

proptest! {
    #[test]
    fn closed_form_matches_float_oracle(q in 1u64..50, n in 1u64..500, num in 0i64..997) {
        let beta = Rat::ratio(num, 997);
        let v = delta_closed(&ThetaFraction::of(&BigInt::from(q), &beta), &BigInt::from(n), 96).value;
        let (re, im) = float_delta(q, n, num as f64 / 997.0);
        prop_assert!((v.re.to_f64_lossy() - re).abs() < 1e-8 * n as f64);
        prop_assert!((v.im.to_f64_lossy() - im).abs() < 1e-8 * n as f64);
    }

    #[test]
    fn magnitude_never_exceeds_n(num in 0i64..1_000_000, den in 1i64..1_000_000, n in 1u64..u64::MAX) {
        let theta = ThetaFraction::of(&BigInt::from(1), &Rat::ratio(num, den));
        let n = BigInt::from(n);
        let d = delta_closed(&theta, &n, 128);
        prop_assert!(d.magnitude.lower() <= &Dyadic::from_int(n.clone()));
        prop_assert!(d.value.abs().intersects(&d.magnitude));
    }

    #[test]
    fn magnitude_is_bounded_by_inverse_sine(num in 1i64..10_000, n in 1u64..1_000_000_000) {
        // |Δ| <= 1/sin(πθ)
        let theta = Rat::ratio(num, 10_007);
        let d = delta_closed(&ThetaFraction::new(theta.clone()).unwrap(), &BigInt::from(n), 128);
        let bound = slowtorus_core::arithmetic::sin_pi(&theta, 128).recip().unwrap();
        prop_assert!(d.magnitude.lower() <= bound.upper());
    }
}

#[test]
fn s_is_dominated_by_t() {
    let (s, _) = build(
        &"power:2,1,1/2".parse().unwrap(),
        3,
        &ConstantsProfile::desk(),
        &PrecisionPolicy::default(),
    )
    .unwrap();
    let alpha = s.alpha();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let n = BigInt::from(rng.gen_range(1u64..1 << 40));
        let (sv, tv) = (s_sum(&s, &alpha, &n, 128), t_sum(&s, &alpha, &n, 128));
        assert!(sv.abs().lower() <= tv.upper());
        assert!(!tv.upper().is_negative());
    }
}

#[test]
fn resonant_level_is_exactly_n() {
    // θ = 0 at the last level of the truncated α
    let (s, _) = build(
        &"log2:2,1".parse().unwrap(),
        2,
        &ConstantsProfile::paper(),
        &PrecisionPolicy::default(),
    )
    .unwrap();
    let theta = ThetaFraction::of(s.q(2), &s.alpha());
    assert!(theta.is_zero());
    let n = s.checkpoint(2).clone();
    let d = delta_closed(&theta, &n, 128);
    assert!(d.magnitude.contains(&IntervalReal::from_int(&n, 128)));
}
