//! Cross-cutting invariants: output ranges, monotonicity in thresholds and
//! widths, dominance orderings, MGF-domination of the sub-Gaussian lemma
//! bound, and the algebraic reductions between bounds.

use proptest::prelude::*;

use tailbound::bounds::{
    azuma, bennett, bernstein, chebyshev, chernoff_bernoulli, g_lower, h_crescent,
    hoeffding_lemma_bound, hoeffding_tail, markov, mcdiarmid,
};
use tailbound::chernoff::{chernoff_optimize, MgfHandle};
use tailbound::model::{
    BoundResult, BoundedSumSpec, Direction, MartingaleDifferenceSpec, MomentProfile, TailQuery,
    Validate, VarRange,
};
use tailbound::oracle::{mc_tail_estimate, SamplerSpec};

fn assert_in_range(r: &BoundResult) {
    assert!(
        (0.0..=1.0).contains(&r.value),
        "value {} out of range",
        r.value
    );
    assert!(r.log_value <= 0.0, "log_value {} positive", r.log_value);
    assert!(r.validate().is_ok());
}

proptest! {
    #[test]
    fn markov_range_and_monotonicity(mean in 0.0..1e6f64, a1 in 1e-3..1e6f64, factor in 1.0..100.0f64) {
        let p = MomentProfile::with_mean(mean).nonnegative();
        let r1 = markov(&p, a1).unwrap();
        let r2 = markov(&p, a1 * factor).unwrap();
        assert_in_range(&r1);
        assert_in_range(&r2);
        prop_assert!(r2.value <= r1.value);
    }

    #[test]
    fn chebyshev_range_and_monotonicity(var in 1e-6..1e6f64, a1 in 1e-3..1e3f64, factor in 1.0..100.0f64, symmetric: bool) {
        let p = MomentProfile::with_mean(0.0).variance(var);
        let r1 = chebyshev(&p, a1, symmetric).unwrap();
        let r2 = chebyshev(&p, a1 * factor, symmetric).unwrap();
        assert_in_range(&r1);
        assert_in_range(&r2);
        prop_assert!(r2.value <= r1.value);
        if symmetric {
            let two_sided = chebyshev(&p, a1, false).unwrap();
            prop_assert!((r1.value - two_sided.value / 2.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn hoeffding_monotone_in_threshold_and_width(
        n in 1usize..40,
        width in 0.1..10.0f64,
        t1 in 0.0..50.0f64,
        dt in 0.0..50.0f64,
        widen in 1.0..4.0f64,
        two_sided: bool,
    ) {
        let dir = if two_sided { Direction::TwoSided } else { Direction::Upper };
        let spec = BoundedSumSpec::homogeneous(n, VarRange::new(0.0, width));
        let r1 = hoeffding_tail(&spec, &TailQuery::sum_deviation(dir, t1)).unwrap();
        let r2 = hoeffding_tail(&spec, &TailQuery::sum_deviation(dir, t1 + dt)).unwrap();
        assert_in_range(&r1);
        assert_in_range(&r2);
        prop_assert!(r2.value <= r1.value);
        // Widening any range weakens the bound.
        let mut wider = spec.clone();
        wider.vars[0] = VarRange::new(0.0, width * widen);
        let r3 = hoeffding_tail(&wider, &TailQuery::sum_deviation(dir, t1)).unwrap();
        prop_assert!(r3.value >= r1.value);
    }

    #[test]
    fn azuma_and_mcdiarmid_monotone(
        n in 1usize..30,
        c in 0.01..10.0f64,
        t1 in 0.0..20.0f64,
        dt in 0.0..20.0f64,
        widen in 1.0..4.0f64,
    ) {
        let spec = MartingaleDifferenceSpec::uniform(n, c);
        let a1 = azuma(&spec, t1, Direction::Upper).unwrap();
        let a2 = azuma(&spec, t1 + dt, Direction::Upper).unwrap();
        assert_in_range(&a1);
        assert_in_range(&a2);
        prop_assert!(a2.value <= a1.value);
        let m1 = mcdiarmid(&spec, t1, Direction::TwoSided).unwrap();
        let m2 = mcdiarmid(&spec, t1 + dt, Direction::TwoSided).unwrap();
        assert_in_range(&m1);
        assert_in_range(&m2);
        prop_assert!(m2.value <= m1.value);
        // Widening any difference bound weakens McDiarmid.
        let mut wider = spec.clone();
        wider.c[0] = c * widen;
        let m3 = mcdiarmid(&wider, t1, Direction::TwoSided).unwrap();
        prop_assert!(m3.value >= m1.value);
    }

    #[test]
    fn bennett_bernstein_range_and_threshold_monotonicity(
        n in 1usize..50,
        v in 1e-3..100.0f64,
        t1 in 0.0..10.0f64,
        dt in 0.0..10.0f64,
    ) {
        let q1 = TailQuery::mean_deviation(Direction::Upper, t1);
        let q2 = TailQuery::mean_deviation(Direction::Upper, t1 + dt);
        let b1 = bennett(n, v, 1.0, &q1).unwrap();
        let b2 = bennett(n, v, 1.0, &q2).unwrap();
        assert_in_range(&b1);
        assert_in_range(&b2);
        prop_assert!(b2.value <= b1.value);
        let s1 = bernstein(n, v, &q1).unwrap();
        let s2 = bernstein(n, v, &q2).unwrap();
        assert_in_range(&s1);
        assert_in_range(&s2);
        prop_assert!(s2.value <= s1.value);
    }

    #[test]
    fn bennett_dominates_bernstein(
        n in 1usize..100,
        v in 1e-3..50.0f64,
        u in 1e-2..100.0f64,
    ) {
        // s = 1: Bennett's exponent is -nv·h(u), Bernstein's is -nv·G(u)
        // with u = t/(nv); h >= G makes Bennett everywhere at least as tight.
        let t_sum = u * n as f64 * v;
        let b = bennett(n, v, 1.0, &TailQuery::sum_deviation(Direction::Upper, t_sum)).unwrap();
        let s = bernstein(n, v, &TailQuery::sum_deviation(Direction::Upper, t_sum)).unwrap();
        prop_assert!(
            b.value <= s.value,
            "bennett {} > bernstein {} at n={n} v={v} u={u}",
            b.value,
            s.value
        );
    }

    #[test]
    fn crescent_dominates_lower_envelope(u in 0.0..1e4f64) {
        prop_assert!(h_crescent(u).unwrap() >= g_lower(u).unwrap());
    }

    #[test]
    fn mcdiarmid_reduces_to_hoeffding(
        widths in prop::collection::vec(0.01..5.0f64, 1..20),
        t in 0.0..20.0f64,
    ) {
        let spec = BoundedSumSpec::new(widths.iter().map(|w| VarRange::new(0.0, *w)).collect());
        let diff = MartingaleDifferenceSpec::new(widths.clone());
        let h = hoeffding_tail(&spec, &TailQuery::sum_deviation(Direction::Upper, t)).unwrap();
        let m = mcdiarmid(&diff, t, Direction::Upper).unwrap();
        let rel = (h.value - m.value).abs() / h.value.max(f64::MIN_POSITIVE);
        prop_assert!(rel <= 1e-12, "hoeffding {} vs mcdiarmid {}", h.value, m.value);
    }

    #[test]
    fn azuma_equal_steps_closed_form(n in 1usize..200, c in 0.01..10.0f64, t in 0.0..50.0f64) {
        let spec = MartingaleDifferenceSpec::uniform(n, c);
        let r = azuma(&spec, t, Direction::Upper).unwrap();
        // Compare exponents: value-domain relative error scales with the
        // exponent magnitude, which the random grid drives past 1e7.
        let closed_log = -t * t / (2.0 * n as f64 * c * c);
        let err = (r.log_value - closed_log.min(0.0)).abs();
        prop_assert!(err <= 1e-12 * closed_log.abs().max(1.0));
    }

    #[test]
    fn bernstein_sum_and_mean_forms_agree(
        n in 1usize..200,
        sigma2 in 1e-3..100.0f64,
        eps in 0.0..10.0f64,
    ) {
        let mean_form = bernstein(n, sigma2, &TailQuery::mean_deviation(Direction::Upper, eps)).unwrap();
        let sum_form = bernstein(
            n,
            sigma2,
            &TailQuery::sum_deviation(Direction::Upper, eps * n as f64),
        )
        .unwrap();
        let rel = (mean_form.value - sum_form.value).abs() / mean_form.value.max(f64::MIN_POSITIVE);
        prop_assert!(rel <= 1e-12);
    }

    #[test]
    fn validation_is_total(
        mean in prop::num::f64::ANY,
        variance in prop::option::of(prop::num::f64::ANY),
        lo in prop::option::of(prop::num::f64::ANY),
        hi in prop::option::of(prop::num::f64::ANY),
        nonnegative: bool,
    ) {
        let profile = MomentProfile {
            mean,
            variance,
            support_lo: lo,
            support_hi: hi,
            nonnegative,
        };
        match profile.validate() {
            Ok(()) => {}
            Err(report) => prop_assert!(!report.violations.is_empty()),
        }
    }
}

/// Exact MGFs of random bounded discrete distributions never exceed the
/// sub-Gaussian lemma bound; equality holds at λ = 0.
#[test]
fn lemma_bound_dominates_exact_mgfs() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x1e77a);
    for _ in 0..200 {
        let lo = rng.random_range(-5.0..5.0);
        let hi = lo + rng.random_range(0.1..10.0);
        let atoms = rng.random_range(2..8);
        let xs: Vec<f64> = (0..atoms).map(|_| rng.random_range(lo..hi)).collect();
        let mut ws: Vec<f64> = (0..atoms).map(|_| rng.random_range(0.01..1.0)).collect();
        let total: f64 = ws.iter().sum();
        for w in &mut ws {
            *w /= total;
        }
        let mean: f64 = xs.iter().zip(&ws).map(|(x, w)| x * w).sum();
        let mut lambda = -10.0;
        while lambda <= 10.0 {
            let exact: f64 = xs
                .iter()
                .zip(&ws)
                .map(|(x, w)| w * (lambda * x).exp())
                .sum();
            let bound = hoeffding_lemma_bound(lambda, mean, lo, hi).unwrap();
            assert!(
                exact <= bound * (1.0 + 1e-12),
                "exact {exact} above bound {bound} at lambda {lambda}"
            );
            lambda += 0.5;
        }
        let at_zero = hoeffding_lemma_bound(0.0, mean, lo, hi).unwrap();
        assert!((at_zero - 1.0).abs() <= 1e-12);
    }
}

/// cosh(x) ≤ exp(x²/2) across the grid the proofs rely on.
#[test]
fn cosh_below_gaussian_envelope() {
    let mut x: f64 = -20.0;
    while x <= 20.0 {
        assert!(x.cosh() <= (x * x / 2.0).exp(), "violated at x = {x}");
        x += 0.1;
    }
}

/// The optimized exact-MGF Chernoff bound never exceeds the closed
/// multiplicative form (the e-bound MGF dominates the exact one pointwise).
#[test]
fn optimized_exact_mgf_below_closed_form() {
    for &n in &[10u64, 50, 100] {
        for &p in &[0.1, 0.3, 0.5] {
            for &delta in &[0.1, 0.5, 1.0] {
                let np = n as f64 * p;
                let a = (1.0 + delta) * np;
                if a >= n as f64 {
                    continue;
                }
                let mgf = MgfHandle::binomial(n, p).unwrap();
                let optimized = chernoff_optimize(&mgf, a).unwrap();
                let closed = chernoff_bernoulli(np, delta).unwrap();
                assert!(
                    optimized.value <= closed.value * (1.0 + 1e-12),
                    "n={n} p={p} delta={delta}: {} > {}",
                    optimized.value,
                    closed.value
                );
            }
        }
    }
}

/// Doubling the sample count shrinks Wilson intervals by ≈ 1/√2 on average.
#[test]
fn wilson_width_shrinks_with_samples() {
    let spec = SamplerSpec::new(
        tailbound::oracle::Distribution::Bernoulli { p: 0.3 },
        1,
        tailbound::oracle::Aggregate::Sum,
    );
    let q = TailQuery::upper_level(1.0);
    let mut ratio_sum = 0.0;
    for seed in 0..20 {
        let small = mc_tail_estimate(&spec, &q, 10_000, seed).unwrap();
        let large = mc_tail_estimate(&spec, &q, 20_000, seed + 1000).unwrap();
        ratio_sum += (large.ci_hi - large.ci_lo) / (small.ci_hi - small.ci_lo);
    }
    let mean_ratio = ratio_sum / 20.0;
    assert!(
        (0.65..=0.75).contains(&mean_ratio),
        "mean width ratio {mean_ratio}"
    );
}
