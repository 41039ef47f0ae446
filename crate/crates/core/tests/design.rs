use proptest::prelude::*;
use twoin1_core::{logrank_drift, logrank_events, orr_z_cutoff, Design, DesignParams};

fn params(m1: u32, m2: u32, m_max: u32) -> DesignParams {
    DesignParams {
        alpha: 0.025,
        power_target: 0.9,
        m1,
        m2,
        m_max,
        m_phase2: 118,
        rho_xy: 0.7,
        rho_xz: 0.5,
        c: 0.0,
    }
}

fn table2() -> Design {
    Design::new(params(60, 120, 330)).unwrap()
}

#[test]
fn information_fraction() {
    assert!((table2().info_fraction() - 1.0 / 3.0).abs() < 1e-15);
    let half = Design::new(DesignParams {
        m_phase2: 90,
        ..params(90, 90, 180)
    })
    .unwrap();
    assert_eq!(half.info_fraction(), 0.5);
    let tiny = Design::new(DesignParams {
        m_phase2: 1,
        ..params(1, 999, 1000)
    })
    .unwrap();
    assert!((tiny.info_fraction() - 0.001).abs() < 1e-15);
}

// Direct evaluation with 16-digit quantiles. These differ from the four-digit
// hand values in the fifth decimal.
#[test]
fn promising_threshold_values() {
    assert!((table2().promising_threshold() - 1.735_714_9).abs() < 1e-6);
    let half = Design::new(DesignParams {
        m_phase2: 90,
        ..params(90, 90, 180)
    })
    .unwrap();
    assert!((half.promising_threshold() - 2.026_680).abs() < 1e-6);
    let late = Design::new(DesignParams {
        m_phase2: 99_999,
        ..params(99_999, 1, 100_000)
    })
    .unwrap();
    assert!((late.promising_threshold() - late.z_alpha()).abs() < 0.01);
}

#[test]
fn conditional_power_examples() {
    let d = table2();
    let w = d.promising_threshold();
    assert!((d.conditional_power(w, 120.0).unwrap() - 0.9).abs() < 1e-9);
    let cp = d.conditional_power(1.550_667_054_490_629, 120.0).unwrap();
    assert!((cp - 0.813).abs() < 1e-9);
    assert!(d.conditional_power(-30.0, 120.0).unwrap() < 1e-12);
    assert!(d.conditional_power(1.0, 0.0).is_err());
    assert!(d.conditional_power(1.0, -5.0).is_err());
}

#[test]
fn case_study_chain() {
    use twoin1_core::numerics::{find_root, Bracket};
    let d = table2();
    let g = |z: f64| d.conditional_power(z, 120.0).unwrap() - 0.813;
    let z1 = find_root(g, Bracket::new(0.5, 3.0, g).unwrap(), 1e-12).unwrap();
    assert!((z1 - 1.550_667).abs() < 1e-6);
    let r = d.reestimate(z1).unwrap();
    assert!(!r.cap_hit);
    assert!((r.m2_star - 166.805).abs() < 0.01, "{}", r.m2_star);
    assert_eq!(r.final_events() - 60, 167);
}

#[test]
fn reestimate_examples() {
    let d = table2();
    let w = d.promising_threshold();
    let at_w = d.reestimate(w).unwrap();
    assert_eq!(at_w.m2_star, 120.0);
    assert!(!at_w.cap_hit);

    let r = d.reestimate(0.5).unwrap();
    assert_eq!(r.m_star, 330.0);
    assert!(r.cap_hit);
    assert!(
        (r.m2_star_uncapped - 2658.9).abs() < 0.1,
        "{}",
        r.m2_star_uncapped
    );

    for z1 in [0.0, -1.0, -8.0] {
        let r = d.reestimate(z1).unwrap();
        assert_eq!(r.m_star, 330.0);
        assert!(r.cap_hit);
    }
    for z1 in [w, 2.5, 6.0] {
        assert_eq!(d.reestimate(z1).unwrap().m_star, 180.0);
    }
}

#[test]
fn reestimate_continuous_at_threshold() {
    let d = table2();
    let w = d.promising_threshold();
    let below = d.reestimate(w - 1e-12).unwrap();
    assert!((below.m2_star_uncapped - 120.0).abs() < 1e-6);
}

#[test]
fn s2in1_reduction() {
    let d = Design::new(params(60, 120, 180)).unwrap();
    for k in -40..=60 {
        let z1 = k as f64 * 0.1;
        let r = d.reestimate(z1).unwrap();
        assert_eq!(r.m_star, 180.0, "z1 = {z1}");
    }
    assert_eq!(d.cap_onset(), d.promising_threshold());
}

#[test]
fn chw_examples() {
    let d = table2();
    assert_eq!(d.chw_statistic(0.0, 0.0), 0.0);
    assert!((d.chw_statistic(2.0, 1.0) - 1.971_197).abs() < 1e-5);
    let (z1, z2): (f64, f64) = (1.9, 0.4);
    let pooled = z1 * (60.0f64 / 180.0).sqrt() + z2 * (120.0f64 / 180.0).sqrt();
    assert!((d.chw_statistic(z1, z2) - pooled).abs() < 1e-15);
}

#[test]
fn event_counts() {
    assert_eq!(logrank_events(0.55, 0.025, 0.9).unwrap(), 118);
    assert_eq!(logrank_events(0.617, 0.025, 0.9).unwrap(), 180);
    assert_eq!(logrank_events(0.7, 0.025, 0.9).unwrap(), 330);
    assert!(logrank_events(1.0, 0.025, 0.9).is_err());
    assert!(logrank_events(1.3, 0.025, 0.9).is_err());
}

#[test]
fn orr_cutoffs() {
    assert!((orr_z_cutoff(0.1, 0.25, 60) - 2.206).abs() < 1e-3);
    assert_eq!(orr_z_cutoff(0.2, 0.2, 60), 0.0);
    assert!((orr_z_cutoff(0.1, 0.3, 60) - 2.828).abs() < 1e-3);
}

#[test]
fn drifts() {
    assert_eq!(logrank_drift(1.0, 100.0), 0.0);
    let d = table2();
    let target = d.z_alpha() + d.z_beta();
    assert!((logrank_drift(0.617, 180.0) - target).abs() < 0.01);
    assert!((logrank_drift(0.664, 60.0) - 1.5856).abs() < 1e-3);
}

proptest! {
    #[test]
    fn cp_inverts_reestimate(frac in 0.0f64..1.0) {
        let d = table2();
        let w = d.promising_threshold();
        let z1 = 0.2 + frac * (w - 0.2);
        prop_assume!(z1 < w);
        let r = d.reestimate(z1).unwrap();
        let cp = d.conditional_power(z1, r.m2_star_uncapped).unwrap();
        prop_assert!((cp - 0.9).abs() < 1e-6, "z1 = {}: {}", z1, cp);
    }

    #[test]
    fn m_star_non_increasing(a in 0.01f64..1.75, b in 0.01f64..1.75) {
        let d = table2();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let rl = d.reestimate(lo).unwrap();
        let rh = d.reestimate(hi).unwrap();
        prop_assert!(rl.m2_star_uncapped >= rh.m2_star_uncapped);
        prop_assert!(rl.m_star >= rh.m_star);
    }

    #[test]
    fn m_star_within_bounds(z1 in -10.0f64..10.0, m_max in 180u32..2000) {
        let d = Design::new(params(60, 120, m_max)).unwrap();
        let r = d.reestimate(z1).unwrap();
        prop_assert!(r.m_star >= 180.0 && r.m_star <= f64::from(m_max));
    }

    #[test]
    fn cp_increasing_in_z1(a in -4.0f64..4.0, gap in 0.01f64..2.0, m2s in 10.0f64..1000.0) {
        let d = table2();
        let lo = d.conditional_power(a, m2s).unwrap();
        let hi = d.conditional_power(a + gap, m2s).unwrap();
        prop_assert!(hi >= lo);
    }
}
