use hyperlab::models::*;
use hyperlab::riemann::*;
use hyperlab::{Error, State};
use proptest::prelude::*;

fn s(x: f64) -> State<f64> {
    State::scalar(x)
}

fn v2(a: f64, b: f64) -> State<f64> {
    State::from_slice(&[a, b])
}

#[test]
fn burgers_shock_curve_from_zero() {
    let m = burgers::<f64>();
    let c = shock_curve(&m, &s(0.0), 0, 1.0, 11).unwrap();
    assert_eq!(c.samples.len(), 11);
    for p in &c.samples[1..] {
        assert!((p.speed - p.s / 2.0).abs() < 1e-12, "{} {}", p.s, p.speed);
        assert!((p.state[0] - p.s).abs() < 1e-12);
    }
    assert!(c.max_rh_residual(&m) < 1e-12);
}

#[test]
fn psystem_shock_curves_satisfy_rh() {
    let m = psystem::<f64>(1.0, 2.0).unwrap();
    for i in 0..2 {
        for smax in [-0.2, 0.2] {
            let c = shock_curve(&m, &v2(1.0, 0.0), i, smax, 21).unwrap();
            assert!(c.max_rh_residual(&m) <= 1e-10, "family {i}");
        }
    }
}

#[test]
fn bad_family_is_rejected() {
    let m = burgers::<f64>();
    assert!(shock_curve(&m, &s(0.0), 1, 1.0, 5).is_err());
}

// w₁ = u + 2√2 v^{−1/2} is constant along 1-rarefactions and
// w₂ = u − 2√2 v^{−1/2} along 2-rarefactions for p = v^{−2}.
#[test]
fn psystem_rarefactions_keep_riemann_invariants() {
    let m = psystem::<f64>(1.0, 2.0).unwrap();
    let k = 2.0 * 2f64.sqrt();
    let base = v2(1.0, 0.0);
    for (i, sign) in [(0usize, 1.0), (1usize, -1.0)] {
        let pts = rarefaction_curve(&m, &base, i, 0.3).unwrap();
        let w = |u: &State<f64>| u[1] + sign * k / u[0].sqrt();
        let w0 = w(&base);
        let drift = pts.iter().map(|p| (w(&p.state) - w0).abs()).fold(0.0, f64::max);
        assert!(drift < 1e-9, "family {i}: {drift}");
        assert!(pts.windows(2).all(|p| p[1].speed > p[0].speed));
        // unit-speed parametrization: the chord sum approaches the arc length
        let chords: f64 = pts.windows(2).map(|p| (p[1].state - p[0].state).norm()).sum();
        assert!((chords - 0.3).abs() < 1e-5, "{chords}");
    }
}

#[test]
fn rarefaction_refinement_is_consistent() {
    let m = psystem::<f64>(1.0, 2.0).unwrap();
    let base = v2(1.0, 0.0);
    let coarse = rarefaction_curve(&m, &base, 1, 0.2).unwrap();
    let fine = rarefaction_curve(&m, &base, 1, 0.4).unwrap();
    // the fine curve passes through the end of the coarse one
    let end = coarse.last().unwrap();
    let mid = fine.iter().find(|p| (p.s - 0.2).abs() < 1e-12).unwrap();
    assert!((mid.state - end.state).norm() < 1e-10);
}

#[test]
fn rarefaction_needs_genuine_nonlinearity() {
    let m = advection::<f64>(1.0);
    assert!(matches!(rarefaction_curve(&m, &s(0.0), 0, 0.5), Err(Error::NotGenuinelyNonlinear { .. })));
}

#[test]
fn burgers_fans() {
    let m = burgers::<f64>();
    let f = solve_riemann(&m, &s(1.0), &s(0.0)).unwrap();
    assert_eq!(f.waves.len(), 1);
    assert!(matches!(f.waves[0], Wave::Shock { .. }));
    assert_eq!(f.waves[0].speed_l(), 0.5);
    assert_eq!(f.evaluate(0.49)[0], 1.0);
    assert_eq!(f.evaluate(0.51)[0], 0.0);

    let f = solve_riemann(&m, &s(0.0), &s(1.0)).unwrap();
    assert!(matches!(f.waves[0], Wave::Rarefaction { .. }));
    assert!((f.evaluate(0.4)[0] - 0.4).abs() < 1e-15);
    assert_eq!(f.min_speed(), Some(0.0));
    assert_eq!(f.max_speed(), Some(1.0));
}

#[test]
fn constant_data_has_no_waves() {
    let m = burgers::<f64>();
    let f = solve_riemann(&m, &s(0.3), &s(0.3)).unwrap();
    assert!(f.waves.is_empty());
    assert_eq!(f.evaluate(-3.0)[0], 0.3);
}

// Entropy solution of a scalar Riemann problem via the Legendre transform of f
// on [u⁻, u⁺]: u(ξ) minimizes f(u) − ξu for u⁻ < u⁺ and maximizes it otherwise.
fn brute_force(f: impl Fn(f64) -> f64, ul: f64, ur: f64, xi: f64, n: usize) -> f64 {
    let (lo, hi) = (ul.min(ur), ul.max(ur));
    let sign = if ul < ur { 1.0 } else { -1.0 };
    let mut best = (f64::INFINITY, lo);
    for k in 0..=n {
        let u = lo + (hi - lo) * k as f64 / n as f64;
        let g = sign * (f(u) - xi * u);
        if g < best.0 {
            best = (g, u);
        }
    }
    best.1
}

#[test]
fn cubic_fan_matches_envelope() {
    let m = cubic::<f64>();
    for (ul, ur) in [(-1.0, 1.0), (1.0, -1.0), (-0.4, 1.2), (0.8, -0.3)] {
        let fan = solve_riemann(&m, &s(ul), &s(ur)).unwrap();
        let jumps: Vec<f64> = fan.waves.iter().filter(|w| w.is_jump()).map(|w| w.speed_l()).collect();
        let mut worst: f64 = 0.0;
        for k in 0..=400 {
            let xi = -0.5 + 5.0 * k as f64 / 400.0;
            if jumps.iter().any(|&j| (xi - j).abs() < 1e-3) {
                continue;
            }
            let want = brute_force(|u| u * u * u, ul, ur, xi, 100_000);
            worst = worst.max((fan.evaluate(xi)[0] - want).abs());
        }
        assert!(worst < 1e-3, "({ul}, {ur}): {worst}");
        assert!(fan.order_defect() <= 1e-9);
    }
}

#[test]
fn liu_margins() {
    let m = burgers::<f64>();
    assert_eq!(liu_admissible(&m, &s(1.0), &s(0.0), 0).unwrap().margin, 0.0);
    let v = liu_admissible(&m, &s(0.0), &s(1.0), 0).unwrap();
    assert!(!v.admissible);
    assert!((v.margin + 0.5).abs() < 1e-15);
}

#[test]
fn entropy_margins() {
    let m = burgers::<f64>();
    let ok = entropy_admissible_shock(&m, &s(1.0), &s(0.0), 0.5).unwrap();
    assert!(ok.admissible && (ok.margin - 1.0 / 6.0).abs() < 1e-15);
    let bad = entropy_admissible_shock(&m, &s(0.0), &s(1.0), 0.5).unwrap();
    assert!(!bad.admissible && (bad.margin + 1.0 / 6.0).abs() < 1e-15);
}

#[test]
fn rh_residual_of_a_wrong_speed() {
    let m = burgers::<f64>();
    assert!((rh_residual(&m, &s(1.0), &s(0.0), 0.6) - 0.1).abs() < 1e-15);
}

#[test]
fn entropy_check_requires_rh() {
    let m = burgers::<f64>();
    assert!(matches!(entropy_admissible_shock(&m, &s(1.0), &s(0.0), 0.7), Err(Error::RhViolated { .. })));
}

#[test]
fn psystem_fan_structure() {
    let m = psystem::<f64>(1.0, 2.0).unwrap();
    let ul = v2(1.0, 0.0);
    let ur = v2(0.97, 0.04);
    let fan = solve_riemann(&m, &ul, &ur).unwrap();
    assert_eq!(fan.omega.first(), Some(&ul));
    assert_eq!(fan.omega.last(), Some(&ur));
    for (w, pair) in fan.waves.iter().zip(fan.omega.windows(2)) {
        assert!((*w.u_l() - pair[0]).norm() < 1e-9);
        assert!((*w.u_r() - pair[1]).norm() < 1e-9);
    }
    assert!(fan.order_defect() <= 1e-9);
}

#[test]
fn small_data_radius_is_positive() {
    let m = psystem::<f64>(1.0, 2.0).unwrap();
    let r = small_data_radius(&m, &v2(1.0, 0.0), 0.25).unwrap();
    assert!(r > 0.0 && r.is_finite());
}

proptest! {
    #[test]
    fn liu_agrees_with_lax_for_burgers(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        prop_assume!((a - b).abs() > 1e-3);
        let m = burgers::<f64>();
        let liu = liu_admissible(&m, &s(a), &s(b), 0).unwrap().admissible;
        let lam = (a + b) / 2.0;
        let lax = a > lam && lam > b;
        prop_assert_eq!(liu, lax);
    }

    #[test]
    fn liu_agrees_with_entropy_for_burgers(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        prop_assume!((a - b).abs() > 1e-3);
        let m = burgers::<f64>();
        let liu = liu_admissible(&m, &s(a), &s(b), 0).unwrap().admissible;
        let ent = entropy_admissible_shock(&m, &s(a), &s(b), (a + b) / 2.0).unwrap().admissible;
        prop_assert_eq!(liu, ent);
    }

    #[test]
    fn scalar_fans_are_ordered_and_self_similar(a in -1.5f64..1.5, b in -1.5f64..1.5, xi in -5.0f64..5.0, t in 0.1f64..10.0) {
        let m = cubic::<f64>();
        let fan = solve_riemann(&m, &s(a), &s(b)).unwrap();
        prop_assert!(fan.order_defect() <= 1e-9);
        // u(x, t) = U(x/t): scaling x and t together leaves the value unchanged
        let x = xi * t;
        prop_assert!((fan.evaluate(x / t) - fan.evaluate(xi)).norm() <= 1e-12);
        let lo = a.min(b) - 1e-12;
        let hi = a.max(b) + 1e-12;
        let u = fan.evaluate(xi)[0];
        prop_assert!(lo <= u && u <= hi);
        prop_assert_eq!(fan.evaluate(-100.0)[0], a);
        prop_assert_eq!(fan.evaluate(100.0)[0], b);
    }

    #[test]
    fn cubic_shocks_are_liu_admissible(a in -1.5f64..1.5, b in -1.5f64..1.5) {
        let m = cubic::<f64>();
        let fan = solve_riemann(&m, &s(a), &s(b)).unwrap();
        for w in &fan.waves {
            if let Wave::Shock { u_l, u_r, speed, liu_margin, .. } = w {
                prop_assert!(*liu_margin >= -1e-9);
                prop_assert!(rh_residual(&m, u_l, u_r, *speed) <= 1e-9);
            }
        }
    }

    #[test]
    fn psystem_small_data(dv in -0.05f64..0.05, du in -0.05f64..0.05) {
        let m = psystem::<f64>(1.0, 2.0).unwrap();
        let ul = v2(1.0, 0.0);
        let ur = v2(1.0 + dv, du);
        let fan = solve_riemann(&m, &ul, &ur).unwrap();
        prop_assert!(fan.order_defect() <= 1e-9);
        for w in &fan.waves {
            if let Wave::Shock { u_l, u_r, speed, liu_margin, .. } = w {
                prop_assert!(rh_residual(&m, u_l, u_r, *speed) <= 1e-9);
                prop_assert!(*liu_margin >= -1e-9);
            }
        }
        prop_assert!((fan.evaluate(-10.0) - ul).norm() < 1e-12);
        prop_assert!((fan.evaluate(10.0) - ur).norm() < 1e-12);
    }
}
