use dephaser::quadrature::{integrate, integrate_nested, integrate_semi_infinite, QuadError, QuadratureConfig};
use proptest::prelude::*;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::new(1e-13, 1e-11)
}

/// Closed-form battery: (integrand, a, b, exact). erfc(6) ≈ 2e-17, so the
/// truncated Gaussian equals √π in double precision.
fn battery() -> Vec<(Box<dyn Fn(f64) -> f64>, f64, f64, f64)> {
    vec![
        (Box::new(|x: f64| x.exp()), 0.0, 1.0, std::f64::consts::E - 1.0),
        (Box::new(|x: f64| 1.0 / x.sqrt()), 0.0, 1.0, 2.0),
        (Box::new(|x: f64| x.ln()), 0.0, 1.0, -1.0),
        (Box::new(|x: f64| 1.0 / (1.0 + x * x)), -10.0, 10.0, 2.0 * 10f64.atan()),
        (Box::new(|x: f64| (50.0 * x).sin().powi(2)), 0.0, std::f64::consts::PI, std::f64::consts::PI / 2.0),
        (Box::new(|x: f64| (-x * x).exp()), -6.0, 6.0, std::f64::consts::PI.sqrt()),
        (Box::new(|x: f64| x.powi(9)), 0.0, 2.0, 102.4),
    ]
}

#[test]
fn error_estimates_are_honest() {
    for (i, (f, a, b, exact)) in battery().into_iter().enumerate() {
        let r = integrate(f, a, b, &cfg()).unwrap();
        let actual = (r.value - exact).abs();
        assert!(actual <= r.abs_error_estimate.max(1e-15 * exact.abs()) * 1.0001, "case {i}: actual {actual:e} > estimate {:e}", r.abs_error_estimate);
        assert!(actual <= 1e-10 * exact.abs().max(1.0), "case {i}: {actual:e}");
    }
}

#[test]
fn oscillatory_sinc_deficit_up_to_alpha_1e4() {
    use dephaser::specfun::sinc_deficit;
    // ∫₀¹ (1 − sin αx/αx) dx = 1 − Si(α)/α, 20-digit references
    let cases = [
        (10.0, 0.834_165_240_578_112_595),
        (100.0, 0.984_377_745_331_109_437),
        (1e3, 0.998_429_766_878_031_229),
        (1e4, 0.999_842_910_845_461_404),
    ];
    for (alpha, exact) in cases {
        let cfg = QuadratureConfig::new(1e-14, 1e-10).with_panel_hint(std::f64::consts::PI / alpha);
        let r = integrate(|x| sinc_deficit(alpha * x), 0.0, 1.0, &cfg).unwrap();
        let tol = 1e-9;
        assert!((r.value - exact).abs() < tol, "alpha {alpha}: {} vs {exact}", r.value);
    }
}

#[test]
fn gaussian_weighted_sinc_deficit_reference() {
    use dephaser::specfun::sinc_deficit;
    let alpha = 50.0;
    let cfg = QuadratureConfig::new(1e-300, 1e-11).with_panel_hint(std::f64::consts::PI / alpha);
    let r = integrate(|x| (-x * x).exp() * sinc_deficit(alpha * x) / x, 0.0, 10.0, &cfg).unwrap();
    // 50-digit reference
    assert!((r.value - 3.201_030_998_135_683_95).abs() < 1e-9, "{}", r.value);
}

#[test]
fn semi_infinite_gaussian() {
    let r = integrate_semi_infinite(|x| (-x * x).exp(), 0.0, 1.0, &cfg()).unwrap();
    assert!((r.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12);
}

#[test]
fn nested_matches_product() {
    let outer = QuadratureConfig::new(1e-13, 1e-11);
    let r = integrate_nested(|x, t| x * t.cos(), (0.0, 2.0), 0.0, |_| 1.0, &outer, &outer).unwrap();
    assert!((r.value - 2.0 * 1f64.sin()).abs() < 1e-11);
    // triangle: ∫₀¹ dx ∫₀ˣ dt 1 = 1/2
    let r = integrate_nested(|_, _| 1.0, (0.0, 1.0), 0.0, |x| x, &outer, &outer).unwrap();
    assert!((r.value - 0.5).abs() < 1e-13);
}

#[test]
fn failures_are_reported_not_hidden() {
    let tiny = QuadratureConfig::new(1e-15, 1e-15).with_max_subdivisions(4);
    match integrate(|x| (1.0 / x).sin(), 0.0, 1.0, &tiny) {
        Err(QuadError::NonConvergence { subdivisions, .. }) => assert!(subdivisions <= 4),
        other => panic!("expected non-convergence, got {other:?}"),
    }
    assert!(matches!(
        integrate(|x| if x > 0.5 { f64::NAN } else { 1.0 }, 0.0, 1.0, &cfg()),
        Err(QuadError::NonFiniteSample { .. })
    ));
}

proptest! {
    #[test]
    fn additivity(a in -3.0f64..0.0, m in 0.0f64..2.0, b in 2.0f64..5.0, w in 0.1f64..8.0) {
        let f = |x: f64| (w * x).sin() * (-0.1 * x * x).exp() + x * x;
        let whole = integrate(f, a, b, &cfg()).unwrap().value;
        let left = integrate(f, a, m, &cfg()).unwrap().value;
        let right = integrate(f, m, b, &cfg()).unwrap().value;
        prop_assert!((whole - left - right).abs() <= 1e-10 * whole.abs().max(1.0));
    }

    #[test]
    fn reversed_limits_rejected(a in -2.0f64..2.0, len in 0.1f64..4.0) {
        let f = |x: f64| (x * 1.3).cos() + 0.2 * x;
        prop_assert!(integrate(f, a, a + len, &cfg()).is_ok());
        let back = integrate(f, a + len, a, &cfg());
        prop_assert!(matches!(back, Err(QuadError::InvalidInput(_))));
    }

    #[test]
    fn polynomial_exactness(c0 in -5.0f64..5.0, c1 in -5.0f64..5.0, c2 in -5.0f64..5.0, c3 in -5.0f64..5.0) {
        let f = |x: f64| c0 + c1 * x + c2 * x * x + c3 * x * x * x;
        let exact = 2.0 * c0 + 2.0 / 3.0 * c2;
        let r = integrate(f, -1.0, 1.0, &cfg()).unwrap();
        prop_assert!((r.value - exact).abs() < 1e-12 * (1.0 + exact.abs()));
    }
}
