use proptest::prelude::*;
use viscofix_core::solver::{solve_implicit, ImplicitStep};
use viscofix_core::{
    average_pseudocontraction, check_nonexpansive, check_strict_pseudocontraction,
    forward_projected, iterate_bound, run_observed, ConvexSet, GeneralizedContraction,
    MonotoneOperatorSpec, NonexpansiveMap, Operator, Params, Point, Schedule, SchemeKind,
    SolverConfig, Space,
};

fn weighted() -> Space {
    Space::with_weights(vec![0.5, 1.0, 2.0]).unwrap()
}

fn audit(space: &Space, t: &NonexpansiveMap, seed: u64) {
    let r = check_nonexpansive(space, t, 200, seed).unwrap();
    assert!(r.pass, "{} ratio {}", t.label(), r.max_ratio);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn linear_maps_are_nonexpansive(slope in -1.0f64..=1.0, seed in any::<u64>()) {
        let space = weighted();
        audit(&space, &NonexpansiveMap::linear(&space, slope).unwrap(), seed);
    }

    #[test]
    fn projections_are_nonexpansive(
        lo in prop::collection::vec(-5.0f64..0.0, 3),
        width in prop::collection::vec(0.0f64..5.0, 3),
        radius in 0.1f64..8.0,
        seed in any::<u64>(),
    ) {
        let space = weighted();
        let hi: Vec<f64> = lo.iter().zip(&width).map(|(l, w)| l + w).collect();
        let boxed = ConvexSet::boxed(&space, lo, hi).unwrap();
        audit(&space, &NonexpansiveMap::projection(&space, boxed).unwrap(), seed);
        let ball = ConvexSet::ball(&space, Point::new(vec![1.0, -1.0, 0.5]).unwrap(), radius).unwrap();
        audit(&space, &NonexpansiveMap::projection(&space, ball).unwrap(), seed ^ 1);
    }

    #[test]
    fn forward_projected_maps_are_nonexpansive(
        alpha in 0.1f64..4.0,
        frac in 0.01f64..=1.0,
        radius in 0.5f64..5.0,
        seed in any::<u64>(),
    ) {
        let space = weighted();
        let a = MonotoneOperatorSpec::scaled_identity(&space, alpha).unwrap();
        let k = ConvexSet::ball(&space, space.zero(), radius).unwrap();
        let t = forward_projected(&space, k, &a, frac * 2.0 * alpha).unwrap();
        audit(&space, &t, seed);
    }

    #[test]
    fn averaged_pseudocontractions_are_nonexpansive(
        k in -0.95f64..-0.05,
        frac in 0.01f64..=1.0,
        seed in any::<u64>(),
    ) {
        // S = k I satisfies ||Sx - Sy||^2 <= ||x - y||^2 - lambda ||(I - S)x - (I - S)y||^2
        // exactly when lambda <= (1 + k) / (1 - k).
        let lambda = (1.0 + k) / (1.0 - k);
        let space = weighted();
        let s = Operator::new("kI", move |x: &Point| x.scale(k));
        let audit_s = check_strict_pseudocontraction(&space, &s, lambda, 200, seed).unwrap();
        prop_assert!(audit_s.pass, "slack {}", audit_s.worst_slack);
        let t = average_pseudocontraction(&s, lambda, frac * lambda, 1.0).unwrap();
        audit(&space, &t, seed);
    }

    #[test]
    fn inner_solve_meets_its_certificate(
        a1 in 0.0f64..1.0,
        split in 0.0f64..1.0,
        delta in 0.0f64..=1.0,
        slope in -1.0f64..=1.0,
        c in 0.0f64..0.99,
        x in -10.0f64..10.0,
    ) {
        let a3 = (1.0 - a1) * split;
        let p = Params { alpha1: a1, alpha2: 1.0 - a1 - a3, alpha3: a3, delta };
        prop_assume!(a3 * delta < 0.999);
        let space = Space::euclidean(1).unwrap();
        let t = NonexpansiveMap::linear(&space, slope).unwrap();
        let xn = Point::scalar(x);
        let fx = GeneralizedContraction::linear(c).unwrap().apply(&xn);
        let step = ImplicitStep::new_implicit(&xn, &fx, &p).unwrap();
        let cfg = SolverConfig { max_inner: 100_000, ..SolverConfig::default() };
        let (u, _) = solve_implicit(&space, &step, &t, &xn, &cfg).unwrap();
        let gap = space.distance(&u, &step.apply(&t, &u)).unwrap();
        prop_assert!(gap <= cfg.inner_tol * 1.01 + 1e-15 * x.abs().max(1.0), "gap {gap}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn iterates_stay_within_the_a_priori_bound(
        slope in -1.0f64..1.0,
        c in 0.0f64..0.9,
        x1 in -10.0f64..10.0,
        preset in 0usize..3,
        scheme in prop::sample::select(vec![SchemeKind::NewImplicit, SchemeKind::MannImplicit]),
    ) {
        let space = Space::euclidean(1).unwrap();
        let t = NonexpansiveMap::linear(&space, slope).unwrap();
        let f = GeneralizedContraction::linear(c).unwrap();
        let schedule = [Schedule::eq75(), Schedule::halpern_mix(), Schedule::compare_t16()][preset].clone();
        let cfg = SolverConfig { max_outer: 2_000, record_trace: false, ..SolverConfig::default() };
        let p = Point::scalar(0.0);
        let x1 = Point::scalar(x1);
        let mut worst = 0.0f64;
        run_observed(&space, scheme, Some(&f), &t, &schedule, &x1, &cfg, |s| {
            worst = worst.max(s.x[0].abs());
        }).unwrap();
        let f_used = (!scheme.uses_identity_f()).then_some(&f);
        let bound = iterate_bound(&space, &x1, &p, f_used).unwrap();
        prop_assert!(worst <= bound + 1e-9, "{worst} > {bound}");
    }
}
