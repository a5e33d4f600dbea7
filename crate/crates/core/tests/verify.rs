use hyperlab::models::*;
use hyperlab::schemes::*;
use hyperlab::verify::*;
use hyperlab::{Error, State};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn s(x: f64) -> State<f64> {
    State::scalar(x)
}

fn v2(a: f64, b: f64) -> State<f64> {
    State::from_slice(&[a, b])
}

fn pc(bps: &[f64], vals: &[f64]) -> PiecewiseConstantFn<f64> {
    PiecewiseConstantFn::new(bps.to_vec(), vals.iter().map(|&v| s(v)).collect()).unwrap()
}

fn nburgers() -> FluxModel<f64> {
    burgers::<f64>().normalize_speeds(2.0).unwrap()
}

// Cell averages of `f(t, ·)` stored at `levels` equally spaced times.
fn synthetic(f: impl Fn(f64, f64) -> f64, domain: (f64, f64), dx: f64, t_final: f64, levels: usize) -> GridSolution<f64> {
    let n = ((domain.1 - domain.0) / dx).round() as usize;
    let dt = t_final / (levels - 1) as f64;
    let snapshots = (0..levels)
        .map(|j| {
            let t = j as f64 * dt;
            let cells = (0..n)
                .map(|k| {
                    let xa = domain.0 + dx * k as f64;
                    s((0..16).map(|q| f(t, xa + dx * (q as f64 + 0.5) / 16.0)).sum::<f64>() / 16.0)
                })
                .collect();
            Snapshot { step: j, t, cells }
        })
        .collect();
    GridSolution {
        scheme: "synthetic".into(),
        t0: 0.0,
        dt,
        dx,
        x0: domain.0,
        n_cells: n,
        boundary: Boundary::ConstantExtension,
        snapshots,
        history: Vec::new(),
        thetas: Vec::new(),
    }
}

#[test]
fn total_variation_examples() {
    let step = pc(&[0.3], &[1.0, 0.0]);
    assert_eq!(total_variation(Profile::Pc(&step), (-1.0, 1.0)), 1.0);
    for n in [10, 1000] {
        let cells: Vec<State<f64>> = (0..n).map(|k| s(k as f64 / (n - 1) as f64)).collect();
        let tv = total_variation(Profile::Grid { x0: 0.0, dx: 1.0 / n as f64, cells: &cells }, (0.0, 1.0));
        assert!((tv - 1.0).abs() < 1e-12);
    }
    let n = 10_000;
    let dx = std::f64::consts::TAU / n as f64;
    let cells: Vec<State<f64>> = (0..n).map(|k| s((dx * (k as f64 + 0.5)).sin())).collect();
    let tv = total_variation(Profile::Grid { x0: 0.0, dx, cells: &cells }, (0.0, std::f64::consts::TAU));
    assert!((tv - 4.0).abs() < 1e-3, "{tv}");
}

#[test]
fn jumps_of_an_exact_step() {
    let m = burgers::<f64>();
    let sol = synthetic(|t, x| if x < 0.5 * t { 1.0 } else { 0.0 }, (-1.0, 2.0), 0.01, 1.0, 21);
    let jumps = detect_jumps(&m, &sol, 0.5, &JumpOptions::default()).unwrap();
    assert_eq!(jumps.len(), 1, "{jumps:?}");
    let j = &jumps[0];
    assert!((j.lambda - 0.5).abs() < 1e-3, "{}", j.lambda);
    assert!((j.xi - 0.25).abs() < 0.02);
    assert!(j.rh_residual < 1e-2);
}

#[test]
fn no_jumps_in_smooth_data() {
    let m = burgers::<f64>();
    let sol = synthetic(|_, x| (-x * x).exp(), (-3.0, 3.0), 0.01, 0.5, 11);
    assert!(detect_jumps(&m, &sol, 0.25, &JumpOptions::default()).unwrap().is_empty());
}

#[test]
fn jump_window_must_cover_two_cells() {
    let m = burgers::<f64>();
    let sol = synthetic(|_, x| if x < 0.0 { 1.0 } else { 0.0 }, (-1.0, 1.0), 0.01, 0.5, 5);
    let opts = JumpOptions { radius: Some(0.01), ..Default::default() };
    assert!(detect_jumps(&m, &sol, 0.25, &opts).is_err());
}

#[test]
fn jump_in_a_viscous_profile() {
    let m = burgers::<f64>();
    let cfg = SchemeConfig { eps: 0.005, t_final: 0.4, domain: (-0.3, 0.8), max_snapshots: 41, ..Default::default() };
    let sol = viscous_run(&m, &pc(&[0.0], &[1.0, 0.0]).into(), &cfg).unwrap();
    let opts = JumpOptions { radius: Some(0.1), ..Default::default() };
    let jumps = detect_jumps(&m, &sol, 0.3, &opts).unwrap();
    assert_eq!(jumps.len(), 1, "{jumps:?}");
    let j = &jumps[0];
    assert!((j.u_minus[0] - 1.0).abs() < 5e-2 && j.u_plus[0].abs() < 5e-2);
    assert!((j.lambda - 0.5).abs() < 5e-2, "{}", j.lambda);
    assert!(j.liu_margin.unwrap() >= -0.05 * j.size());
}

#[test]
fn weak_residual_of_exact_and_wrong_shocks() {
    let m = burgers::<f64>();
    // the scaled defect grows like the bump radius squared; width 4 gives radius 1/2
    let w = Window::new((0.0, 1.0), (-1.5, 2.5));
    let fam = TestFamily::default();
    let exact = TravelingStep { x0: 0.0, u_minus: s(1.0), u_plus: s(0.0), speed: 0.5, t_final: 1.0 };
    assert!(weak_residual(&m, &exact, &w, &fam).unwrap().max_ratio() <= 1e-6);
    let wrong = TravelingStep { speed: 0.6, ..exact };
    let r = weak_residual(&m, &wrong, &w, &fam).unwrap().max_ratio();
    assert!(r >= 0.01, "{r}");
}

#[test]
fn weak_residual_decreases_under_refinement() {
    let m = nburgers();
    let mut res = Vec::new();
    for eps in [0.01, 0.005, 0.0025, 0.00125] {
        let cfg = SchemeConfig { eps, t_final: 1.0, ..Default::default() };
        let sol = godunov_run(&m, &pc(&[0.0], &[1.0, 0.0]).into(), &cfg).unwrap();
        let w = Window::new((0.0, 1.0), (-0.5, 1.5));
        res.push(weak_residual(&m, &sol, &w, &TestFamily::default()).unwrap().max_ratio());
    }
    assert!(res.windows(2).all(|p| p[1] < p[0]), "{res:?}");
}

#[test]
fn underresolved_test_scale_is_reported() {
    let m = nburgers();
    let cfg = SchemeConfig { eps: 0.1, t_final: 0.5, ..Default::default() };
    let sol = godunov_run(&m, &pc(&[0.0], &[1.0, 0.0]).into(), &cfg).unwrap();
    let w = Window::new((0.0, 0.5), (-0.5, 1.5));
    let r = weak_residual(&m, &sol, &w, &TestFamily::default());
    assert!(matches!(r, Err(Error::QuadratureUnderResolved { .. })));
}

#[test]
fn entropy_surplus_signs() {
    let m = burgers::<f64>();
    let w = Window::new((0.0, 1.0), (-1.0, 2.0));
    let fam = TestFamily::default();
    let good = TravelingStep { x0: 0.0, u_minus: s(1.0), u_plus: s(0.0), speed: 0.5, t_final: 1.0 };
    let r = entropy_residual(&m, &good, &w, &fam).unwrap();
    let worst = r.tests.iter().min_by(|a, b| a.value.partial_cmp(&b.value).unwrap()).unwrap();
    assert!(r.min_surplus() >= -1e-12, "{} {:?}", r.min_surplus(), worst);
    let bad = TravelingStep { x0: 0.0, u_minus: s(0.0), u_plus: s(1.0), speed: 0.5, t_final: 1.0 };
    assert!(weak_residual(&m, &bad, &w, &fam).unwrap().max_ratio() <= 1e-6);
    let surplus = entropy_residual(&m, &bad, &w, &fam).unwrap().min_surplus();
    assert!(surplus < -1e-3, "{surplus}");
}

#[test]
fn entropy_equality_for_smooth_solutions() {
    let m = burgers::<f64>();
    let sol = CharacteristicSolution::new(&m, |x: f64| 0.5 * (-x * x).exp(), (-3.0, 3.0), 60_000, 0.5);
    let w = Window::new((0.0, 0.5), (-2.0, 2.0));
    let r = entropy_residual(&m, &sol, &w, &TestFamily::default()).unwrap();
    assert!(r.min_surplus().abs() <= 1e-6, "{}", r.min_surplus());
}

#[test]
fn entropy_needs_a_pair() {
    let m = FluxModel::<f64>::new("plain", 1, |u: &State<f64>| State::scalar(u[0] * u[0]));
    let step = TravelingStep { x0: 0.0, u_minus: s(1.0), u_plus: s(0.0), speed: 1.0, t_final: 1.0 };
    let w = Window::new((0.0, 1.0), (-1.0, 2.0));
    assert!(matches!(entropy_residual(&m, &step, &w, &TestFamily::default()), Err(Error::MissingEntropyPair)));
}

#[test]
fn certificate_of_exact_front_tracking() {
    let m = burgers::<f64>();
    let data = pc(&[0.0], &[1.0, 0.0]);
    let sol = front_tracking_run(&m, &data, &SchemeConfig { t_final: 1.0, ..Default::default() }).unwrap();
    let c = certify_eps_approx(&m, &sol, Some(&data), 0.5, (-1.0, 2.0), &CertifyOptions::default()).unwrap();
    assert!(c.combined <= 1e-6, "{c:?}");
}

#[test]
fn certificate_tracks_front_tracking_accuracy() {
    let m = burgers::<f64>();
    let data = pc(&[0.0], &[0.0, 1.0]);
    let mut eps = Vec::new();
    for delta in [0.05, 0.025] {
        let sol = front_tracking_run(&m, &data, &SchemeConfig { t_final: 1.0, delta, ..Default::default() }).unwrap();
        let c = certify_eps_approx(&m, &sol, Some(&data), 1.0, (-1.0, 2.0), &CertifyOptions::default()).unwrap();
        eps.push(c.combined);
    }
    assert!(eps[0] <= 0.2 && eps[1] < eps[0], "{eps:?}");
}

#[test]
fn certificate_rejects_a_corrupted_speed() {
    let m = burgers::<f64>();
    let exact = TravelingStep { x0: 0.0, u_minus: s(1.0), u_plus: s(0.0), speed: 0.5, t_final: 1.0 };
    let bad = TravelingStep { speed: 0.6, ..exact };
    let c = certify_eps_approx(&m, &bad, Some(&exact.profile(0.0)), 0.6, (-1.0, 2.0), &CertifyOptions::default()).unwrap();
    assert!(c.combined >= 0.01, "{}", c.combined);
    assert!(c.combined >= c.weak_excess && c.combined >= c.lipschitz_excess);
}

#[test]
fn partition_examples() {
    let eps = 0.1;
    assert!(interval_partition(&pc(&[0.0], &[0.0, 0.05]), eps).is_empty());
    let three = pc(&[0.0, 1.0, 2.0], &[0.0, eps, 2.0 * eps, 3.0 * eps]);
    assert_eq!(interval_partition(&three, eps), vec![0.0, 1.0, 2.0]);
    let n = 1000;
    let bps: Vec<f64> = (1..n).map(|k| k as f64 / n as f64).collect();
    let vals: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
    let ramp = pc(&bps, &vals);
    let intervals = interval_partition(&ramp, eps).len() + 1;
    assert!(intervals == 10 || intervals == 11, "{intervals}");
}

#[test]
fn decomposition_of_a_constant() {
    let m = nburgers();
    let sol = Stationary { u: PiecewiseConstantFn::constant(s(0.3)), t_final: 1.0 };
    let oracle = FanOracle { model: &m, dx: 1e-3 };
    let d = error_decomposition(&m, &sol, &oracle, 0.0, 0.1, &[0.1, 0.05, 0.025], (-1.0, 2.0)).unwrap();
    for t in &d.terms {
        assert!(t.a.iter().chain(&t.b).all(|&x| x == 0.0));
        assert_eq!(t.direct, 0.0);
    }
}

#[test]
fn decomposition_of_an_exact_shock() {
    let m = nburgers();
    let sol = TravelingStep { x0: 0.0, u_minus: s(1.0), u_plus: s(0.0), speed: 0.625, t_final: 1.0 };
    let oracle = FanOracle { model: &m, dx: 1e-3 };
    let d = error_decomposition(&m, &sol, &oracle, 0.2, 0.1, &[0.1, 0.05, 0.025], (-1.0, 2.0)).unwrap();
    assert_eq!(d.jumps.len(), 1);
    assert!((d.jumps[0].lambda - 0.625).abs() < 1e-12);
    let a: Vec<f64> = d.terms.iter().map(|t| t.a.iter().sum::<f64>()).collect();
    assert!(a.iter().all(|&x| x <= 1e-9), "{a:?}");
}

#[test]
fn decomposition_of_a_shifted_shock() {
    // the same step displaced by 0.01 carries an O(1) jump term at every h
    let m = nburgers();
    let sol = TravelingStep { x0: 0.01, u_minus: s(1.0), u_plus: s(0.0), speed: 0.6, t_final: 1.0 };
    let oracle = FanOracle { model: &m, dx: 1e-3 };
    let hs = [0.1, 0.05, 0.025];
    let d = error_decomposition(&m, &sol, &oracle, 0.0, 0.1, &hs, (-1.0, 2.0)).unwrap();
    for t in &d.terms {
        assert!(t.total() >= t.direct * 0.9 - 1e-12, "{t:?}");
    }
}

#[test]
fn semigroup_bound_on_an_exact_path() {
    let m = nburgers();
    let oracle = FanOracle { model: &m, dx: 1e-3 };
    let step = TravelingStep { x0: 0.0, u_minus: s(1.0), u_plus: s(0.0), speed: 0.625, t_final: 1.0 };
    let path: Vec<(f64, PiecewiseConstantFn<f64>)> = (0..=10).map(|k| (k as f64 / 10.0, step.profile(k as f64 / 10.0))).collect();
    let b = semigroup_error_bound(&path, &oracle, 1.0, (-1.0, 2.0)).unwrap();
    assert!(b.bound <= 1e-12 && b.actual <= 1e-12, "{b:?}");

    // one artificial restart displaces the front by 0.02
    let d = 0.02;
    let mut kinked = path.clone();
    for (k, item) in kinked.iter_mut().enumerate().skip(5) {
        item.1 = TravelingStep { x0: d, ..step }.profile(k as f64 / 10.0);
    }
    let b = semigroup_error_bound(&kinked, &oracle, 1.0, (-1.0, 2.0)).unwrap();
    assert!(b.bound >= d - 1e-12, "{b:?}");
    assert!(b.actual <= b.bound + 1e-12);
    assert_eq!(b.terms.iter().filter(|&&t| t > 1e-12).count(), 1);
}

#[test]
fn semigroup_bound_needs_increasing_times() {
    let m = nburgers();
    let oracle = FanOracle { model: &m, dx: 1e-3 };
    let u = PiecewiseConstantFn::constant(s(0.0));
    assert!(semigroup_error_bound(&[(0.0, u.clone())], &oracle, 1.0, (0.0, 1.0)).is_err());
    assert!(semigroup_error_bound(&[(0.5, u.clone()), (0.1, u)], &oracle, 1.0, (0.0, 1.0)).is_err());
}

#[test]
fn fan_oracle_refuses_several_jumps() {
    let m = nburgers();
    let oracle = FanOracle { model: &m, dx: 1e-3 };
    assert!(matches!(oracle.evolve(&pc(&[0.0, 1.0], &[1.0, 0.0, 1.0]), 0.1), Err(Error::OracleUnavailable(_))));
}

#[test]
fn q_decomposition_examples() {
    let m = burgers::<f64>();
    let u = pc(&[0.0, 1.0], &[0.0, 1.0, 0.5]);
    let q = q_decomposition(&m, &u, &u).unwrap();
    assert_eq!(q.phi0, 0.0);
    assert!(q.strengths.iter().all(|s| s[0] == 0.0));
}

#[test]
fn q_decomposition_is_equivalent_to_l1_on_psystem() {
    let m = psystem::<f64>(1.0, 2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 1.0f64;
    for _ in 0..50 {
        let bps = vec![-0.5, 0.0, 0.7];
        let base: Vec<State<f64>> = (0..4).map(|_| v2(1.0 + rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05))).collect();
        let pert: Vec<State<f64>> = base.iter().map(|b| *b + v2(rng.gen_range(-0.02..0.02), rng.gen_range(-0.02..0.02))).collect();
        let u = PiecewiseConstantFn::new(bps.clone(), base).unwrap();
        let v = PiecewiseConstantFn::new(vec![-0.4, 0.0, 0.7], pert).unwrap();
        let q = q_decomposition(&m, &u, &v).unwrap();
        let r = q.phi0 / q.l1;
        worst = worst.max(r).max(1.0 / r);
    }
    assert!(worst <= 2.0, "C = {worst}");
}

#[test]
fn rate_fit_recovers_exact_models() {
    let eps = [0.1, 0.05, 0.025, 0.0125];
    let pts: Vec<(f64, f64)> = eps.iter().map(|&e: &f64| (e, 2.0 * e.sqrt() * e.ln().abs())).collect();
    let f = rate_fit(&pts, RateModel::SqrtLog).unwrap();
    assert!((f.c - 2.0).abs() < 1e-10 && (f.r2 - 1.0).abs() < 1e-12);
    let pts: Vec<(f64, f64)> = eps.iter().map(|&e| (e, e)).collect();
    let f = rate_fit(&pts, RateModel::Power).unwrap();
    assert!((f.p - 1.0).abs() < 1e-10 && (f.c - 1.0).abs() < 1e-10);
    assert!((f.predict(0.2) - 0.2).abs() < 1e-10);
    assert_eq!(f.r2, f.recompute_r2());
}

#[test]
fn rate_fit_rejects_degenerate_data() {
    assert!(matches!(rate_fit(&[(0.1, 1.0), (0.05, 0.5)], RateModel::Power), Err(Error::DegenerateData(_))));
    assert!(matches!(rate_fit(&[(0.1, 1.0), (0.05, 0.0), (0.01, 0.1)], RateModel::Power), Err(Error::DegenerateData(_))));
}

#[test]
fn l1_distance_examples() {
    let a = pc(&[0.0], &[1.0, 0.0]);
    assert_eq!(l1_distance(Profile::Pc(&a), Profile::Pc(&a), (-1.0, 1.0)).unwrap(), 0.0);
    let b = pc(&[0.3], &[1.0, 0.0]);
    assert!((l1_distance(Profile::Pc(&a), Profile::Pc(&b), (-1.0, 1.0)).unwrap() - 0.3).abs() < 1e-15);
    let c = pc(&[0.3], &[-1.0, 1.0]);
    let d = pc(&[0.1], &[-1.0, 1.0]);
    assert!((l1_distance(Profile::Pc(&c), Profile::Pc(&d), (-1.0, 1.0)).unwrap() - 2.0 * 0.2).abs() < 1e-15);
}

#[test]
fn l1_distance_of_offset_gaussians() {
    let (lo, hi) = (-6.0, 6.0);
    let n = 10_000;
    let dx = (hi - lo) / n as f64;
    let shift = 1e-2;
    let g = |c: f64| -> Vec<State<f64>> { (0..n).map(|k| s((-(lo + dx * (k as f64 + 0.5) - c).powi(2)).exp())).collect() };
    let (a, b) = (g(0.0), g(shift));
    let d = l1_distance(Profile::Grid { x0: lo, dx, cells: &a }, Profile::Grid { x0: lo, dx, cells: &b }, (lo, hi)).unwrap();
    let exact = 2.0 * std::f64::consts::PI.sqrt() * statrs::function::erf::erf(shift / 2.0);
    assert!((d - exact).abs() <= 1e-6, "{d} vs {exact}");
}

proptest! {
    #[test]
    fn scalar_phi0_is_the_l1_distance(
        u in proptest::collection::vec(-1.0f64..1.0, 3),
        v in proptest::collection::vec(-1.0f64..1.0, 4),
    ) {
        let m = burgers::<f64>();
        // equal far fields keep the distance finite
        let v = [u[0], v[1], v[2], u[2]];
        let a = pc(&[0.0, 0.5], &u);
        let b = pc(&[-0.2, 0.3, 0.9], &v);
        let q = q_decomposition(&m, &a, &b).unwrap();
        let l1 = a.l1_distance(&b, -10.0, 10.0);
        prop_assert!((q.phi0 - l1).abs() <= 1e-12 * (1.0 + l1));
        prop_assert!((q.phi0 - q.l1).abs() <= 1e-12 * (1.0 + l1));
    }

    #[test]
    fn partition_intervals_have_small_variation(vals in proptest::collection::vec(-1.0f64..1.0, 2..12), eps in 0.05f64..1.0) {
        let bps: Vec<f64> = (0..vals.len() - 1).map(|k| k as f64).collect();
        let f = pc(&bps, &vals);
        let pts = interval_partition(&f, eps);
        let mut edges = vec![-1.0];
        edges.extend(pts.iter().copied());
        edges.push(vals.len() as f64);
        for w in edges.windows(2) {
            // open interval: jumps strictly inside
            let inner: f64 = bps.iter().enumerate().filter(|(_, &x)| x > w[0] && x < w[1]).map(|(i, _)| (vals[i + 1] - vals[i]).abs()).sum();
            prop_assert!(inner < eps);
        }
        let tv = f.total_variation();
        // a cut is forced only once an interval and the next jump carry eps together
        prop_assert!(pts.len() as f64 <= 2.0 * tv / eps + 1.0);
    }
}
