use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slowtorus_core::{
    apply_f, apply_f_inv, build, choose_c, orbit_cocycle, sigma, w_sum, ConstantsProfile,
    ConstructionState, GrowthEvaluator, IntervalReal, PrecisionPolicy, Rat, TorusImage, TorusPoint,
};

fn desk(depth: usize) -> ConstructionState {
    build(
        &"power:2,1,1/2".parse().unwrap(),
        depth,
        &ConstantsProfile::desk(),
        &PrecisionPolicy::default(),
    )
    .unwrap()
    .0
}

fn reference() -> ConstructionState {
    build(
        &"log2:2,1".parse().unwrap(),
        2,
        &ConstantsProfile::paper(),
        &PrecisionPolicy::default(),
    )
    .unwrap()
    .0
}

#[test]
fn cocycle_agrees_with_spectral_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (i, state) in [desk(3), reference()].iter().enumerate() {
        let alpha = state.alpha();
        let c = choose_c(state);
        let cases = if i == 0 { 70 } else { 30 };
        for _ in 0..cases {
            let x = Rat::ratio(rng.gen_range(0..1 << 20), 1 << 20);
            let n = rng.gen_range(1u64..=500);
            let orbit = orbit_cocycle(state, &c, &alpha, &x, n, 128).unwrap();
            let spectral = w_sum(state, &alpha, &x, &BigInt::from(n), 128)
                .unwrap()
                .mul_rat(&c);
            assert!(
                orbit.w.intersects(&spectral),
                "x={x} N={n}: {:?} vs {:?}",
                orbit.w,
                spectral
            );
        }
    }
}

/// Largest singular value of a general 2×2 matrix from the eigenvalues of
/// `MᵀM`, in floating point.
fn svd_oracle(m: [[f64; 2]; 2]) -> f64 {
    let [[a, b], [c, d]] = m;
    let (p, q, r) = (a * a + c * c, a * b + c * d, b * b + d * d);
    let tr = p + r;
    let disc = ((p - r) * (p - r) + 4.0 * q * q).sqrt();
    ((tr + disc) / 2.0).sqrt()
}

#[test]
fn sigma_matches_singular_value_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let w: f64 = rng.gen_range(-1000.0..1000.0);
        let s = sigma(&IntervalReal::from_rat(
            &Rat::ratio((w * 1e6).round() as i64, 1_000_000),
            128,
        ));
        let exact = svd_oracle([[1.0, 0.0], [(w * 1e6).round() / 1e6, 1.0]]);
        let got = s.to_f64_lossy();
        assert!(
            (got - exact).abs() <= 1e-12 * exact.max(1.0),
            "w={w}: {got} vs {exact}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cocycle_is_additive(num in 0i64..1 << 16, n in 1u64..200, m in 1u64..200) {
        let state = desk(2);
        let alpha = state.alpha();
        let c = choose_c(&state);
        let x = Rat::ratio(num, 1 << 16);
        let whole = orbit_cocycle(&state, &c, &alpha, &x, n + m, 128).unwrap();
        let first = orbit_cocycle(&state, &c, &alpha, &x, n, 128).unwrap();
        let shifted = (&x + &(&alpha * &Rat::from_i64(n as i64))).frac();
        let second = orbit_cocycle(&state, &c, &alpha, &shifted, m, 128).unwrap();
        prop_assert!(whole.w.intersects(&first.compose(&second).w));
    }

    #[test]
    fn sigma_is_even_and_monotone(a in -1_000_000i64..1_000_000, b in 0i64..1_000_000) {
        let w = IntervalReal::from_rat(&Rat::ratio(a, 1000), 128);
        prop_assert!(sigma(&w).intersects(&sigma(&w.neg())));
        let (lo, hi) = (a.abs(), a.abs() + b);
        let s_lo = sigma(&IntervalReal::from_rat(&Rat::ratio(lo, 1000), 128));
        let s_hi = sigma(&IntervalReal::from_rat(&Rat::ratio(hi, 1000), 128));
        prop_assert!(s_lo.lower() <= s_hi.upper());
        // σ >= 1 for every unipotent matrix
        prop_assert!(s_lo.upper() >= &slowtorus_core::arithmetic::Dyadic::one());
    }

    #[test]
    fn inverse_map_undoes_map(xn in 0i64..1 << 20, yn in 0i64..1 << 20) {
        let state = desk(2);
        let alpha = state.alpha();
        let c = choose_c(&state);
        let p = TorusPoint::new(Rat::ratio(xn, 1 << 20), Rat::ratio(yn, 1 << 20)).unwrap();
        let img = apply_f(&state, &c, &alpha, &TorusImage::from_point(&p, 128), 128);
        let back = apply_f_inv(&state, &c, &alpha, &img, 128);
        prop_assert_eq!(&back.x, &p.x);
        let y = IntervalReal::from_rat(&p.y, 128);
        let one = IntervalReal::one(128);
        prop_assert!(back.y.intersects(&y) || back.y.intersects(&y.add(&one)) || back.y.intersects(&y.sub(&one)));
    }
}

#[test]
fn theorem_bounds_at_desk_scale() {
    let state = desk(3);
    let alpha = state.alpha();
    let c = choose_c(&state);
    let eval = GrowthEvaluator::new(&state, &c, &alpha, 128, 64).unwrap();
    let mut points: Vec<BigInt> = (1u64..=2000).step_by(7).map(BigInt::from).collect();
    points.extend((1..=3).map(|j| state.checkpoint(j).clone()));
    for n in &points {
        let rec = eval.record(n).unwrap();
        assert!(rec.gamma.upper() <= rec.phi_n.lower(), "Γ_{n} above φ");
    }
    for j in 1..=3 {
        let rec = eval.record(state.checkpoint(j)).unwrap();
        let floor = rec.phi_n.mul_rat(&Rat::ratio(1, 40_000));
        assert!(
            rec.gamma.lower() >= floor.upper(),
            "Γ at N_{j} below φ/40000"
        );
    }
}
