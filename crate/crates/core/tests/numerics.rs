use twoin1_core::numerics::{
    find_root, integrate_unit, norm_cdf, norm_pdf, std_normal_cdf, std_normal_quantile, Bracket,
    QuadratureRule, DEFAULT_TOL,
};
use twoin1_core::Error;

// Reference values from a 40-digit erf evaluation.
#[test]
fn cdf_matches_high_precision_oracle() {
    assert_eq!(std_normal_cdf(0.0).unwrap(), 0.5);
    assert!((std_normal_cdf(1.959964).unwrap() - 0.975_000_000_903_557_6).abs() < 1e-12);
    let tail = std_normal_cdf(-10.0).unwrap();
    assert!((tail / 7.619_853_024_160_526e-24 - 1.0).abs() < 1e-12);
    assert!(std_normal_cdf(-40.0).unwrap() < 1e-300);
}

#[test]
fn cdf_rejects_non_finite() {
    for x in [f64::NAN, f64::INFINITY, f64::NEG_INFINITY] {
        assert!(matches!(std_normal_cdf(x), Err(Error::Domain { .. })));
    }
}

#[test]
fn quantile_matches_oracle() {
    assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
    assert!((std_normal_quantile(0.975).unwrap() - 1.959_963_984_540_054).abs() < 1e-12);
    assert!((std_normal_quantile(0.9).unwrap() - 1.281_551_565_544_600_4).abs() < 1e-12);
    assert!((std_normal_quantile(1e-20).unwrap() + 9.262_340_089_798_409).abs() < 1e-10);
    for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
        assert!(std_normal_quantile(p).is_err());
    }
}

#[test]
fn cdf_symmetry() {
    for k in 0..=1600 {
        let x = -8.0 + k as f64 * 0.01;
        let s = norm_cdf(x) + norm_cdf(-x);
        assert!((s - 1.0).abs() <= 1e-12, "x = {x}: {s}");
    }
}

#[test]
fn quantile_inverts_cdf() {
    for k in 0..=1200 {
        let x = -6.0 + k as f64 * 0.01;
        let back = std_normal_quantile(norm_cdf(x)).unwrap();
        assert!((back - x).abs() < 1e-8, "x = {x}: {back}");
    }
    for k in 1..1000 {
        let p = k as f64 / 1000.0;
        let q = std_normal_quantile(p).unwrap();
        assert!((norm_cdf(q) - p).abs() <= 1e-10);
    }
}

#[test]
fn unit_rule_integrates_constant() {
    let rule = QuadratureRule::default();
    assert_eq!(rule.len(), 64 * 16);
    assert!((integrate_unit(|_| 1.0, &rule).unwrap() - 1.0).abs() < 1e-12);
    assert!(rule.nodes().iter().all(|&s| s > 0.0 && s < 1.0));
    assert!(rule.weights().iter().all(|&w| w > 0.0));
}

#[test]
fn lower_tail_transform_recovers_cdf() {
    let rule = QuadratureRule::default();
    for a in [-2.0, 0.0, 2.0] {
        let v = integrate_unit(
            |s| {
                let x = a - (1.0 - s) / s;
                norm_pdf(x) / (s * s)
            },
            &rule,
        )
        .unwrap();
        assert!((v - norm_cdf(a)).abs() < 1e-8, "a = {a}: {v}");
    }
}

#[test]
fn upper_tail_transform_recovers_survival() {
    let rule = QuadratureRule::default();
    for a in [-2.0, 0.0, 2.0] {
        let v = integrate_unit(
            |s| {
                let x = a + s / (1.0 - s);
                norm_pdf(x) / ((1.0 - s) * (1.0 - s))
            },
            &rule,
        )
        .unwrap();
        assert!((v - norm_cdf(-a)).abs() < 1e-8, "a = {a}: {v}");
    }
}

// Pr(Y > z_{0.975}) = α for a standard bivariate normal once X ≤ c is sure.
#[test]
fn phase2_integrand_limit_is_alpha() {
    let rule = QuadratureRule::default();
    let za = std_normal_quantile(0.975).unwrap();
    let rho: f64 = 0.7;
    let sd = (1.0 - rho * rho).sqrt();
    let v = integrate_unit(
        |s| {
            let x = 8.0 - (1.0 - s) / s;
            norm_cdf((rho * x - za) / sd) * norm_pdf(x) / (s * s)
        },
        &rule,
    )
    .unwrap();
    assert!((v - 0.025).abs() < 1e-6, "{v}");
}

#[test]
fn non_finite_integrand_reports_node() {
    let rule = QuadratureRule::default();
    match integrate_unit(|s| if s > 0.5 { f64::NAN } else { s }, &rule) {
        Err(Error::NonFinite { node }) => assert!(node > 0.5 && node < 1.0),
        other => panic!("{other:?}"),
    }
}

#[test]
fn root_examples() {
    let g = |x: f64| x - 1.0;
    let r = find_root(g, Bracket::new(0.0, 2.0, g).unwrap(), DEFAULT_TOL).unwrap();
    assert!((r - 1.0).abs() <= DEFAULT_TOL);

    let g = |x: f64| norm_cdf(x) - 0.975;
    let r = find_root(g, Bracket::new(0.0, 4.0, g).unwrap(), DEFAULT_TOL).unwrap();
    assert!((r - 1.959_964).abs() < 1e-6);

    let g = |x: f64| x * x + 1.0;
    assert!(matches!(
        Bracket::new(-1.0, 2.0, g),
        Err(Error::NoSignChange { .. })
    ));
}

#[test]
fn root_independent_of_bracket() {
    let g = |x: f64| norm_cdf(x) - 0.9;
    let brackets = [
        (0.0, 2.0),
        (-5.0, 5.0),
        (1.0, 1.5),
        (-0.3, 40.0),
        (1.28, 1.29),
    ];
    let roots: Vec<f64> = brackets
        .iter()
        .map(|&(lo, hi)| find_root(g, Bracket::new(lo, hi, g).unwrap(), DEFAULT_TOL).unwrap())
        .collect();
    for r in &roots {
        assert!((r - roots[0]).abs() <= 2.0 * DEFAULT_TOL, "{roots:?}");
    }
}
