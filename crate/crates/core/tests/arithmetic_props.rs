use num_bigint::{BigInt, BigUint, Sign};
use proptest::prelude::*;
use slowtorus_core::arithmetic::{cos_pi, exp_rat, ln, sin_cos_pi_frac, sin_pi, IntervalReal, Rat};

fn big(max_words: usize) -> impl Strategy<Value = BigInt> {
    (
        any::<bool>(),
        prop::collection::vec(any::<u32>(), 1..=max_words),
    )
        .prop_map(|(neg, w)| {
            BigInt::from_biguint(if neg { Sign::Minus } else { Sign::Plus }, BigUint::new(w))
        })
}

fn nonzero(max_words: usize) -> impl Strategy<Value = BigInt> {
    big(max_words).prop_filter("nonzero", |b| b.sign() != Sign::NoSign)
}

fn rat(max_words: usize) -> impl Strategy<Value = Rat> {
    (big(max_words), nonzero(max_words)).prop_map(|(n, d)| Rat::new(n, d).unwrap())
}

fn small_rat() -> impl Strategy<Value = Rat> {
    (-1_000_000i64..1_000_000, 1i64..1_000_000).prop_map(|(n, d)| Rat::ratio(n, d))
}

#[derive(Clone, Copy, Debug)]
enum Op {
    FromRat,
    Add,
    Mul,
    Div,
    Sqrt,
    Exp,
    Ln,
    Sin,
    Cos,
}

fn eval(op: Op, a: &Rat, b: &Rat, prec: u32) -> Option<IntervalReal> {
    let x = IntervalReal::from_rat(a, prec);
    let y = IntervalReal::from_rat(b, prec);
    match op {
        Op::FromRat => Some(x),
        Op::Add => Some(x.add(&y)),
        Op::Mul => Some(x.mul(&y)),
        Op::Div => x.div(&y).ok(),
        Op::Sqrt => x.abs().sqrt().ok(),
        Op::Exp => exp_rat(&(a.frac() * Rat::from_i64(-40)), prec).ok(),
        Op::Ln => ln(&x.abs().add(&IntervalReal::one(prec)), prec).ok(),
        Op::Sin => Some(sin_pi(a, prec)),
        Op::Cos => Some(cos_pi(a, prec)),
    }
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        Just(Op::FromRat),
        Just(Op::Add),
        Just(Op::Mul),
        Just(Op::Div),
        Just(Op::Sqrt),
        Just(Op::Exp),
        Just(Op::Ln),
        Just(Op::Sin),
        Just(Op::Cos),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn doubled_precision_stays_inside(op in op(), a in prop_oneof![small_rat(), rat(8)], b in small_rat(), prec in 64u32..400) {
        let lo = eval(op, &a, &b, prec);
        let hi = eval(op, &a, &b, 2 * prec);
        match (lo, hi) {
            (Some(lo), Some(hi)) => prop_assert!(lo.contains(&hi), "{op:?}({a}, {b}) at {prec}: {lo:?} vs {hi:?}"),
            (lo, hi) => prop_assert!(lo.is_none() && hi.is_none()),
        }
    }
}

proptest! {
    #[test]
    fn rational_sum_clears_denominators(a in big(12), b in nonzero(12), c in big(12), d in nonzero(12)) {
        let x = Rat::new(a.clone(), b.clone()).unwrap();
        let y = Rat::new(c.clone(), d.clone()).unwrap();
        let lhs = (x + y) * Rat::from_integer(d.clone()) * Rat::from_integer(b.clone());
        prop_assert_eq!(lhs, Rat::from_integer(&a * &d + &c * &b));
    }

    #[test]
    fn rat_is_in_lowest_terms(x in rat(10)) {
        use num_integer::Integer;
        prop_assert!(x.denom().sign() == Sign::Plus);
        prop_assert!(x.numer().gcd(x.denom()) == BigInt::from(1) || x.numer().sign() == Sign::NoSign);
    }

    #[test]
    fn sin_pi_has_period_two(theta in prop_oneof![small_rat(), rat(6)], k in big(40), prec in 32u32..300) {
        let shifted = &theta + &Rat::from_integer(k * 2);
        let a = sin_pi(&theta, prec);
        let b = sin_pi(&shifted, prec);
        prop_assert!(a.intersects(&b), "{a:?} vs {b:?}");
    }

    #[test]
    fn sin_pi_width_is_within_tolerance(theta in prop_oneof![small_rat(), rat(6)], prec in 8u32..400) {
        let s = sin_pi(&theta, prec);
        prop_assert!(s.width() <= slowtorus_core::arithmetic::Dyadic::pow2(-(prec as i64) + 2));
    }

    #[test]
    fn unreduced_fraction_matches_reduced(n in -10_000i64..10_000, d in 1i64..10_000, m in 1i64..1000, prec in 16u32..200) {
        let (s1, c1) = sin_cos_pi_frac(&BigInt::from(n * m), &BigInt::from(d * m), prec);
        let t = Rat::ratio(n, d);
        prop_assert!(s1.intersects(&sin_pi(&t, prec)));
        prop_assert!(c1.intersects(&cos_pi(&t, prec)));
    }

    #[test]
    fn frac_lies_in_unit_interval(x in rat(6)) {
        let f = x.frac();
        prop_assert!(!f.is_negative() && f < Rat::one());
        prop_assert!((&x - &f).is_integer());
    }
}

#[test]
fn sin_pi_of_sixth_is_half() {
    // independent oracle: sin(π/6) = 1/2 exactly
    let s = sin_pi(&Rat::ratio(1, 6), 200);
    assert!(s.contains_rat(&Rat::ratio(1, 2)));
    assert!(s.width() <= slowtorus_core::arithmetic::Dyadic::pow2(-198));
}

#[test]
fn sin_pi_of_huge_numerator_reduces_exactly() {
    // θ = 2·10^12000 + 1/6, which is 1/6 modulo 2
    let ten = BigInt::from(10).pow(12_000);
    let k = ten * 6;
    let theta = Rat::new(k * 2 + 1, BigInt::from(6)).unwrap();
    assert!(sin_pi(&theta, 128).contains_rat(&Rat::ratio(1, 2)));
}
