//! One pass/fail line per acceptance criterion. Runs without the libtest
//! harness so the report is always printed; exits non-zero if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slowtorus_core::arithmetic::Dyadic;
use slowtorus_core::{
    build, choose_c, delta_closed, delta_direct, orbit_cocycle, sigma, verify_all, w_sum,
    Certificate, ConstantsProfile, ConstructionState, Error, IntervalReal, Mutation,
    PrecisionPolicy, Rat, Status, ThetaFraction, VerifyConfig,
};

fn reference() -> ConstructionState {
    build(
        &"log2:2,1".parse().unwrap(),
        2,
        &ConstantsProfile::paper(),
        &PrecisionPolicy::new(128, 1024),
    )
    .unwrap()
    .0
}

fn failing(cert: &Certificate) -> Vec<String> {
    cert.checks
        .iter()
        .filter(|r| r.status != Status::Pass && !r.waived)
        .map(|r| format!("{}@{:?}:{:?}", r.name, r.level, r.status))
        .collect()
}

/// Every result named `name` passes; returns how many there were.
fn all_pass(cert: &Certificate, name: &str) -> usize {
    let rs: Vec<_> = cert.check(name).collect();
    assert!(!rs.is_empty(), "no `{name}` results");
    for r in &rs {
        assert_eq!(
            r.status,
            Status::Pass,
            "{name} at level {:?} β {:?}",
            r.level,
            r.beta
        );
    }
    rs.len()
}

fn criterion_1() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let tiny = Dyadic::pow2(-40); // < 1e-12
    let start = Instant::now();
    for case in 0..200 {
        let q = BigInt::from(rng.gen_range(1u64..=100));
        let n = rng.gen_range(1u64..=2000);
        let den = rng.gen_range(1i64..=100_000);
        let beta = Rat::ratio(rng.gen_range(0..2 * den), den);
        let direct = delta_direct(&q, n, &beta, 128).unwrap();
        let closed = delta_closed(&ThetaFraction::of(&q, &beta), &BigInt::from(n), 128).value;
        assert!(direct.intersects(&closed), "case {case}");
        for iv in [&direct.re, &direct.im, &closed.re, &closed.im] {
            assert!(iv.width() < tiny, "case {case} too wide");
        }
    }
    let t = start.elapsed();
    assert!(t < Duration::from_secs(10), "{t:?}");
    format!(
        "200 cases intersect, widths < 2^-40, {:.2}s",
        t.as_secs_f64()
    )
}

fn criterion_2(cert: &Certificate) -> String {
    let mut betas: Vec<_> = cert
        .checks
        .iter()
        .filter(|r| r.name == "claim-8")
        .filter_map(|r| r.beta.clone())
        .collect();
    betas.sort();
    betas.dedup();
    let a1: Vec<_> = betas.iter().filter(|b| b.starts_with("A1.")).collect();
    assert_eq!(a1.len(), 2 + 8, "{betas:?}");
    assert!(a1.iter().any(|b| *b == "A1.lo") && a1.iter().any(|b| *b == "A1.hi"));
    let n: usize = ["claim-8", "claim-9", "claim-10"]
        .iter()
        .map(|c| all_pass(cert, c))
        .sum();
    let indeterminate = cert
        .checks
        .iter()
        .filter(|r| r.status == Status::Indeterminate)
        .count();
    assert_eq!(indeterminate, 0);
    format!("{n} claim results, A_1 endpoints + 8 interior β (and {} more at A_2), 0 INDETERMINATE at ≤1024 bits", betas.len() - a1.len())
}

fn criterion_3(state: &ConstructionState) -> String {
    let v = serde_json::to_value(state).unwrap();
    assert_eq!(v["r"][0], "2^-3");
    assert_eq!(Rat::pow2(-3), Rat::ratio(1, 8));
    assert_eq!(v["N"][1], "65");
    assert_eq!(v["q"][1], "6500");
    assert_eq!(v["A"][0][0], "6501/6500");
    assert_eq!(state.alpha(), Rat::ratio(6501, 6500));
    "r_1 = 1/8, N_1 = 65, q_2 = 6500, α = 6501/6500".into()
}

fn induction(cert: &Certificate) -> usize {
    (11..=19).map(|i| all_pass(cert, &format!("ind-{i}"))).sum()
}

fn criterion_4(reference: &Certificate, reference_time: Duration) -> String {
    let start = Instant::now();
    let (desk, _) = build(
        &"power:2,1,1/2".parse().unwrap(),
        5,
        &ConstantsProfile::desk(),
        &PrecisionPolicy::new(128, 1024),
    )
    .unwrap();
    let digits = |n: &BigInt| n.to_string().len();
    let n2 = digits(desk.checkpoint(2));
    let m2 = digits(desk.threshold(2).exact().expect("M_2 materialized"));
    let n3 = digits(desk.checkpoint(3));
    assert!(
        (22..=24).contains(&n2) && (30..=33).contains(&m2) && (60..=72).contains(&n3),
        "{n2} {m2} {n3}"
    );
    let cert = verify_all(
        &desk,
        &desk.alpha(),
        &choose_c(&desk),
        &VerifyConfig::default(),
    )
    .unwrap();
    assert_eq!(cert.status, Status::Pass, "{:?}", failing(&cert));
    let total = reference_time + start.elapsed();
    assert!(total < Duration::from_secs(300), "{total:?}");
    format!(
        "ind-11..19: {} reference + {} DESK-5 results PASS; N_2 ~ 10^{}, M_2 ~ 10^{}, N_3 ~ 10^{}; {:.0}s",
        induction(reference),
        induction(&cert),
        n2 - 1,
        m2 - 1,
        n3 - 1,
        total.as_secs_f64()
    )
}

fn criterion_5(cert: &Certificate) -> String {
    let f6 = cert.check("final-6").map(|r| r.instances).sum::<u64>();
    let f7 = cert.check("final-7").map(|r| r.instances).sum::<u64>();
    all_pass(cert, "final-6");
    all_pass(cert, "final-7");
    assert!(f7 >= 10_000 + 64, "{f7}");
    format!("final-6 at {f6} checkpoints, final-7 at {f7} N")
}

fn criterion_6(cert: &Certificate, c: &Rat) -> String {
    assert_eq!(c, &Rat::ratio(1, 400));
    all_pass(cert, "theorem-upper");
    all_pass(cert, "theorem-lower");
    let up = cert
        .check("theorem-upper")
        .map(|r| r.instances)
        .sum::<u64>();
    let low = cert
        .check("theorem-lower")
        .map(|r| r.instances)
        .sum::<u64>();
    format!("c = 1/400: Γ ≤ φ at {up} N, Γ ≥ φ/40000 at {low} checkpoints")
}

/// Largest singular value of [[1,0],[w,1]] via the eigenvalues of MᵀM.
fn svd_oracle(w: f64) -> f64 {
    let (p, q, r) = (1.0 + w * w, w, 1.0);
    (((p + r) + ((p - r) * (p - r) + 4.0 * q * q).sqrt()) / 2.0).sqrt()
}

fn criterion_7(state: &ConstructionState) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (alpha, c) = (state.alpha(), choose_c(state));
    for _ in 0..100 {
        let x = Rat::ratio(rng.gen_range(0..1 << 24), 1 << 24);
        let n = rng.gen_range(1u64..=500);
        let orbit = orbit_cocycle(state, &c, &alpha, &x, n, 128).unwrap();
        let spectral = w_sum(state, &alpha, &x, &BigInt::from(n), 128)
            .unwrap()
            .mul_rat(&c);
        assert!(orbit.w.intersects(&spectral), "x={x} N={n}");
    }
    let mut worst = 0f64;
    for _ in 0..50 {
        let w = Rat::ratio(rng.gen_range(-10_000_000i64..10_000_000), 10_000);
        let got = sigma(&IntervalReal::from_rat(&w, 128)).to_f64_lossy();
        let want = svd_oracle(w.to_f64_lossy());
        let err = (got - want).abs() / want.max(1.0);
        worst = worst.max(err);
    }
    assert!(worst <= 1e-12, "{worst}");
    format!("100 cocycle overlaps, σ within {worst:.1e} on 50 samples")
}

fn criterion_8(state: &ConstructionState) -> String {
    let quick = VerifyConfig::quick();
    let cert = verify_all(state, &state.alpha(), &Rat::zero(), &quick).unwrap();
    assert_eq!(cert.status_of("theorem-lower"), Some(Status::Fail));
    let c = choose_c(state);
    let mut caught = Vec::new();
    for m in Mutation::ALL {
        let bad = m.apply(state).unwrap();
        let cert = verify_all(&bad, &bad.alpha(), &c, &quick).unwrap();
        let named = m
            .expected_failures()
            .iter()
            .find(|n| cert.status_of(n) == Some(Status::Fail));
        let named = named.unwrap_or_else(|| panic!("{m} passed {:?}", m.expected_failures()));
        caught.push(format!("{m}→{named}"));
    }
    format!("c=0 fails theorem-lower; {}", caught.join(", "))
}

fn criterion_9() -> String {
    match build(
        &"log2:2,1".parse().unwrap(),
        4,
        &ConstantsProfile::paper(),
        &PrecisionPolicy::default(),
    ) {
        Err(Error::Overflow { quantity, .. }) => assert_eq!(quantity, "r_3"),
        other => panic!("expected OVERFLOW, got {:?}", other.map(|s| s.0.depth())),
    }
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_slowtorus"))
        .args([
            "run",
            "--depth",
            "4",
            "--out-dir",
            tmp.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(out.status.code(), Some(4), "{stderr}");
    let line = stderr
        .lines()
        .find(|l| l.contains("OVERFLOW at r_3"))
        .expect("diagnostic")
        .to_string();
    format!("exit 4: {line}")
}

fn main() {
    let start = Instant::now();
    let state = reference();
    let c = choose_c(&state);
    let cert = verify_all(&state, &state.alpha(), &c, &VerifyConfig::default()).unwrap();
    let reference_time = start.elapsed();
    assert_eq!(cert.status, Status::Pass, "{:?}", failing(&cert));

    let criteria: Vec<(usize, Box<dyn FnOnce() -> String + '_>)> = vec![
        (1, Box::new(criterion_1)),
        (2, Box::new(|| criterion_2(&cert))),
        (3, Box::new(|| criterion_3(&state))),
        (4, Box::new(|| criterion_4(&cert, reference_time))),
        (5, Box::new(|| criterion_5(&cert))),
        (6, Box::new(|| criterion_6(&cert, &c))),
        (7, Box::new(|| criterion_7(&state))),
        (8, Box::new(|| criterion_8(&state))),
        (9, Box::new(criterion_9)),
    ];
    let mut failed = Vec::new();
    for (i, f) in criteria {
        match catch_unwind(AssertUnwindSafe(f)) {
            Ok(detail) => println!("criterion {i}: PASS  {detail}"),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {i}: FAIL  {msg}");
                failed.push(i);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria PASS");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
