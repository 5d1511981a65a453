use hpkahler::geometry::{self, ChartPoint};
use hpkahler::verifier::{self, VerificationConfig};
use hpkahler::{OdeTolerances, Profile, ProfileSolution};
use proptest::prelude::*;

fn solve(alpha: f64) -> ProfileSolution {
    ProfileSolution::solve(&Profile::p_alpha(alpha).unwrap(), &OdeTolerances::default()).unwrap()
}

fn base_point(v: &[f64]) -> Vec<f64> {
    // squash into the open unit ball
    let r2: f64 = v.iter().map(|x| x * x).sum();
    v.iter().map(|x| x / (1.0 + r2).sqrt()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn phi_matches_second_derivative_form(alpha in -3.9..4.0f64, s in 0.02..1.0f64) {
        let sol = solve(alpha);
        let t = s * sol.length();
        let [h, _, hpp, _] = sol.jet(t).unwrap();
        let phi = sol.eval_phi(t).unwrap();
        prop_assert!((phi + 4.0 * hpp / h).abs() <= 1e-9 * (1.0 + phi.abs()));
    }

    #[test]
    fn invariants_depend_on_t_only(alpha in -3.5..3.0f64, s in 0.1..0.9f64, psi in -3.0..3.0f64,
                                   w in prop::collection::vec(-2.0..2.0f64, 2)) {
        let sol = solve(alpha);
        let t = s * sol.length();
        let cfg = VerificationConfig::new(alpha, 2);
        let a = verifier::evaluate_point(0, 0, &ChartPoint::origin(t, 2), &sol, &cfg).unwrap();
        let b = verifier::evaluate_point(1, 0, &ChartPoint::new(t, psi, base_point(&w)), &sol, &cfg).unwrap();
        let tol = 1e-8 * (1.0 + a.scalar_curvature.abs());
        prop_assert!((a.scalar_curvature - b.scalar_curvature).abs() <= tol);
        prop_assert!((a.qch.a - b.qch.a).abs() <= tol);
        prop_assert!((a.qch.b - b.qch.b).abs() <= tol);
        prop_assert!((a.qch.c - b.qch.c).abs() <= tol);
    }

    #[test]
    fn frame_components_are_isometry_invariant(alpha in -3.0..3.0f64, s in 0.1..0.9f64, psi in -3.0..3.0f64,
                                               w in prop::collection::vec(-2.0..2.0f64, 2)) {
        let sol = solve(alpha);
        let t = s * sol.length();
        let r0 = verifier::frame_data(&ChartPoint::origin(t, 2), &sol).unwrap().riemann;
        let r1 = verifier::frame_data(&ChartPoint::new(t, psi, base_point(&w)), &sol).unwrap().riemann;
        prop_assert!(r0.add_scaled(&r1, -1.0).max_norm() <= 1e-8 * (1.0 + r0.max_norm()));
    }

    #[test]
    fn kahler_conditions_hold_off_origin(alpha in -3.5..3.0f64, s in 0.1..0.9f64,
                                         w in prop::collection::vec(-1.0..1.0f64, 4)) {
        let sol = solve(alpha);
        let p = ChartPoint::new(s * sol.length(), 0.3, base_point(&w));
        let nj = geometry::nabla_j(&p, &sol).unwrap().into_iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let dw = geometry::d_omega(&p, &sol).unwrap().into_iter().fold(0.0f64, |m, x| m.max(x.abs()));
        prop_assert!(nj < 1e-8 && dw < 1e-10);
    }
}

#[test]
fn alpha_grid_straddles_the_positivity_boundary() {
    for alpha in [-4.5, -4.01, -4.0 - 1e-9, -4.0, f64::NAN, f64::NEG_INFINITY] {
        assert!(Profile::p_alpha(alpha).is_err(), "alpha = {alpha} accepted");
    }
    for alpha in [-4.0 + 1e-6, -3.999, -3.99, -3.0, 0.0, 10.0] {
        assert!(Profile::p_alpha(alpha).is_ok(), "alpha = {alpha} rejected");
    }
    // just inside the boundary the profile still solves
    let sol = solve(-3.99);
    assert!(sol.length().is_finite() && sol.length() > 2.0);
}

#[test]
fn round_sphere_scalar_curvature() {
    let sol = solve(0.0);
    for n in [2, 3, 4] {
        let p = ChartPoint::interior(
            0.7,
            0.2,
            vec![0.1; 2 * (n - 1)],
            &sol,
            geometry::DEFAULT_MARGIN,
        )
        .unwrap();
        let s = geometry::scalar_curvature(&p, &sol).unwrap();
        assert!(
            (s - 4.0 * (n * (n + 1)) as f64).abs() < 1e-8,
            "n = {n}: {s}"
        );
    }
}

#[test]
fn verification_is_deterministic() {
    let mut cfg = VerificationConfig::new(-1.0, 2);
    cfg.samples_t = 4;
    cfg.samples_base = 3;
    let a = verifier::run_verification(&cfg).unwrap();
    let b = verifier::run_verification(&cfg).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    cfg.seed += 1;
    let c = verifier::run_verification(&cfg).unwrap();
    assert_ne!(a.points[2].point.base, c.points[2].point.base);
}

#[test]
fn tolerance_verdicts_are_monotone() {
    let mut cfg = VerificationConfig::new(0.5, 2);
    cfg.samples_t = 3;
    cfg.samples_base = 1;
    let base = verifier::run_verification(&cfg).unwrap();
    let observed = base.check("hp").unwrap().max;
    assert!(observed > 0.0);
    for (scale, expect) in [(0.5, false), (1.0, true), (2.0, true), (1e6, true)] {
        cfg.tolerances.insert("hp".into(), observed * scale);
        let r = verifier::run_verification(&cfg).unwrap();
        assert_eq!(r.check("hp").unwrap().passed, expect, "scale {scale}");
        assert_eq!(r.passed(), expect);
    }
}

#[test]
fn sweep_keeps_order_and_isolates_failures() {
    let template = VerificationConfig {
        samples_t: 2,
        samples_base: 1,
        ..Default::default()
    };
    let entries = verifier::sweep(&[1.0, -4.0, -1.0], 2, &template);
    assert_eq!(
        entries.iter().map(|e| e.alpha).collect::<Vec<_>>(),
        vec![1.0, -4.0, -1.0]
    );
    assert!(entries[0].passed() && entries[2].passed());
    assert!(entries[1].report.is_none());
    assert!(entries[1]
        .error
        .as_deref()
        .unwrap()
        .contains("not positive"));
}

#[test]
fn report_json_round_trips() {
    let mut cfg = VerificationConfig::new(3.0, 2);
    cfg.samples_t = 2;
    cfg.samples_base = 1;
    let r = verifier::run_verification(&cfg).unwrap();
    let back: verifier::VerificationReport =
        serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(r, back);
    assert_eq!(back.schema_version, verifier::SCHEMA_VERSION);
}

#[test]
fn unknown_tolerance_names_are_rejected() {
    let mut cfg = VerificationConfig::new(0.0, 2);
    cfg.tolerances.insert("hpp".into(), 1.0);
    assert!(matches!(
        verifier::run_verification(&cfg),
        Err(hpkahler::Error::Config(_))
    ));
}
