use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use num_bigint::BigInt;
use slowtorus_bench::{desk, reference};
use slowtorus_core::arithmetic::sin_pi;
use slowtorus_core::{
    build, choose_c, delta_closed, orbit_cocycle, ConstantsProfile, GrowthEvaluator,
    PrecisionPolicy, Rat, ThetaFraction,
};

fn arithmetic(c: &mut Criterion) {
    let state = reference();
    // a phase whose numerator and denominator have ~80k bits
    let theta = state.alpha() * Rat::from_integer(state.checkpoint(2).clone());
    let mut g = c.benchmark_group("arithmetic");
    g.bench_function("sin_pi_small", |b| {
        b.iter(|| sin_pi(black_box(&Rat::ratio(3, 13_000)), 128))
    });
    g.bench_function("sin_pi_huge_rational", |b| {
        b.iter(|| sin_pi(black_box(&theta), 128))
    });
    g.finish();
}

fn sums(c: &mut Criterion) {
    let state = reference();
    let theta = ThetaFraction::of(state.q(2), &state.alpha());
    let mut g = c.benchmark_group("sums");
    g.bench_function("delta_closed_n1e4", |b| {
        b.iter(|| delta_closed(&theta, black_box(&BigInt::from(10_000)), 128))
    });
    g.bench_function("delta_closed_horizon", |b| {
        b.iter(|| delta_closed(&theta, black_box(state.horizon()), 128))
    });
    g.finish();
}

fn construction(c: &mut Criterion) {
    let phi = "log2:2,1".parse().unwrap();
    let policy = PrecisionPolicy::new(128, 1024);
    let mut g = c.benchmark_group("construction");
    g.sample_size(10);
    g.bench_function("build_reference", |b| {
        b.iter(|| build(&phi, 2, &ConstantsProfile::paper(), &policy).unwrap())
    });
    g.bench_function("first_crossing_log", |b| {
        b.iter(|| {
            phi.first_crossing(&Rat::ratio(1, 8), &BigInt::from(2), &policy)
                .unwrap()
        })
    });
    g.finish();
}

fn dynamics(c: &mut Criterion) {
    let state = desk(3);
    let (alpha, coupling) = (state.alpha(), choose_c(&state));
    let eval = GrowthEvaluator::new(&state, &coupling, &alpha, 128, 64).unwrap();
    let mut g = c.benchmark_group("dynamics");
    g.bench_function("growth_record_n1e4", |b| {
        b.iter(|| eval.record(black_box(&BigInt::from(10_000))).unwrap())
    });
    g.bench_function("growth_record_checkpoint", |b| {
        b.iter(|| eval.record(state.checkpoint(3)).unwrap())
    });
    g.bench_function("orbit_cocycle_500", |b| {
        b.iter_batched(
            || Rat::ratio(12_345, 1 << 20),
            |x| orbit_cocycle(&state, &coupling, &alpha, &x, 500, 128).unwrap(),
            BatchSize::SmallInput,
        )
    });
    g.finish();
}

criterion_group!(benches, arithmetic, sums, construction, dynamics);
criterion_main!(benches);
