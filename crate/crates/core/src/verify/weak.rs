//! Weak-form and entropy residuals against a finite family of tensor bumps
//! `φ(t, x) = ψ((x − c)/ρ) ψ((t − s)/ρ)`, `ψ(r) = (1 − r²)³`.

use serde::{Deserialize, Serialize};

use super::space_time::SpaceTime;
use crate::error::{Error, Result};
use crate::linalg::State;
use crate::models::FluxModel;
use crate::schemes::{gauss5, PiecewiseConstantFn};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub t0: f64,
    pub t1: f64,
    pub x0: f64,
    pub x1: f64,
}

impl Window {
    pub fn new(t: (f64, f64), x: (f64, f64)) -> Self {
        Self { t0: t.0, t1: t.1, x0: x.0, x1: x.1 }
    }

    pub fn duration(&self) -> f64 {
        self.t1 - self.t0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TestFamily {
    /// Coarsest bump radius; one eighth of the window width by default.
    pub base_scale: Option<f64>,
    /// Number of dyadic scales.
    pub levels: usize,
    /// Distance between neighbouring centres, relative to the radius.
    pub spacing: f64,
    /// Added to the strip length in the scaled residual.
    pub eps_q: f64,
}

impl Default for TestFamily {
    fn default() -> Self {
        Self { base_scale: None, levels: 3, spacing: 0.5, eps_q: 0.0 }
    }
}

/// `max |ψ′| = 6/√5 · (4/5)²`, attained at `r² = 1/5`.
fn psi_prime_max() -> f64 {
    6.0 / 5f64.sqrt() * 0.64
}

impl TestFamily {
    pub fn scales(&self, window: &Window) -> Vec<f64> {
        let base = self.base_scale.unwrap_or((window.x1 - window.x0) / 8.0);
        (0..self.levels.max(1)).map(|k| base / f64::powi(2.0, k as i32)).collect()
    }

    /// `‖φ‖_{W^{1,∞}} = max(‖φ‖_∞, ‖φ_t‖_∞, ‖φ_x‖_∞)` for a bump of radius `ρ`.
    pub fn w1inf_norm(rho: f64) -> f64 {
        1f64.max(psi_prime_max() / rho)
    }

    pub fn describe(&self, window: &Window, tests: usize) -> FamilyDescriptor {
        FamilyDescriptor {
            kernel: "(1-r^2)^3 tensor bump".into(),
            scales: self.scales(window),
            spacing: self.spacing,
            eps_q: self.eps_q,
            tests,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyDescriptor {
    pub kernel: String,
    pub scales: Vec<f64>,
    pub spacing: f64,
    pub eps_q: f64,
    pub tests: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResidual {
    pub x: f64,
    pub t: f64,
    pub scale: f64,
    pub norm: f64,
    /// `|E(φ)|` for the weak form, the signed surplus for the entropy inequality.
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualKind {
    Weak,
    Entropy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripResidual {
    pub kind: ResidualKind,
    pub window: Window,
    pub family: FamilyDescriptor,
    pub tests: Vec<TestResidual>,
}

/// Smallest `ε ≥ 0` with `c ≤ ε (Δτ + ε)`.
pub fn eps_for(c: f64, dtau: f64) -> f64 {
    if c <= 0.0 {
        return 0.0;
    }
    2.0 * c / (dtau + (dtau * dtau + 4.0 * c).sqrt())
}

impl StripResidual {
    fn scaled(&self, r: &TestResidual) -> f64 {
        r.value / ((self.window.duration() + self.family.eps_q) * r.norm)
    }

    /// `max |E(φ)| / ((τ′ − τ + ε_q) ‖φ‖)`.
    pub fn max_ratio(&self) -> f64 {
        self.tests.iter().map(|r| self.scaled(r).abs()).fold(0.0, f64::max)
    }

    /// Smallest scaled signed value; negative means a violated inequality.
    pub fn min_surplus(&self) -> f64 {
        self.tests.iter().map(|r| self.scaled(r)).fold(f64::INFINITY, f64::min)
    }

    /// Smallest `ε` for which every test satisfies the defining bound.
    pub fn eps_required(&self) -> f64 {
        let d = self.window.duration();
        self.tests
            .iter()
            .map(|r| {
                let c = match self.kind {
                    ResidualKind::Weak => r.value.abs(),
                    ResidualKind::Entropy => (-r.value).max(0.0),
                };
                eps_for(c / r.norm, d)
            })
            .fold(0.0, f64::max)
    }
}

fn psi<T: Scalar>(r: T) -> T {
    if r.abs() >= T::one() {
        return T::zero();
    }
    let s = T::one() - r * r;
    s * s * s
}

fn dpsi<T: Scalar>(r: T) -> T {
    if r.abs() >= T::one() {
        return T::zero();
    }
    let s = T::one() - r * r;
    T::lit(-6.0) * r * s * s
}

/// `∫_{−1}^{r} ψ`.
fn psi_int<T: Scalar>(r: T) -> T {
    let r = r.max(-T::one()).min(T::one());
    let r2 = r * r;
    r * (T::one() - r2 * (T::one() - r2 * (T::lit(0.6) - r2 / T::lit(7.0)))) + T::lit(16.0 / 35.0)
}

/// A profile with the densities and fluxes of its pieces evaluated once.
struct Pieces<T> {
    bps: Vec<T>,
    g: Vec<State<T>>,
    h: Vec<State<T>>,
}

impl<T: Scalar> Pieces<T> {
    fn new(p: &PiecewiseConstantFn<T>, g: &dyn Fn(&State<T>) -> State<T>, h: &dyn Fn(&State<T>) -> State<T>) -> Self {
        Self { bps: p.breakpoints().to_vec(), g: p.values().iter().map(g).collect(), h: p.values().iter().map(h).collect() }
    }

    /// `(∫ g(u) ψ((x−c)/ρ) dx, ∫ h(u) ∂_x ψ((x−c)/ρ) dx)`, exact.
    fn moments(&self, c: T, rho: T, dim: usize) -> (State<T>, State<T>) {
        let (lo, hi) = (c - rho, c + rho);
        let mut m = State::zeros(dim);
        let mut d = State::zeros(dim);
        let mut i = self.bps.partition_point(|&b| b <= lo);
        loop {
            let left = if i == 0 { lo } else { self.bps[i - 1].max(lo) };
            if left >= hi {
                break;
            }
            let right = if i == self.bps.len() { hi } else { self.bps[i].min(hi) };
            let (rl, rr) = ((left - c) / rho, (right - c) / rho);
            m = m.axpy(rho * (psi_int(rr) - psi_int(rl)), &self.g[i]);
            d = d.axpy(psi(rr) - psi(rl), &self.h[i]);
            if i == self.bps.len() {
                break;
            }
            i += 1;
        }
        (m, d)
    }
}

fn centers(a: f64, b: f64, step: f64) -> Vec<f64> {
    let n = ((b - a) / step + 1e-9).floor().max(0.0) as usize;
    let mut v: Vec<f64> = (0..=n).map(|k| a + step * k as f64).collect();
    if *v.last().unwrap() < b - 1e-12 * (1.0 + b.abs()) {
        v.push(b);
    }
    v
}

/// Time quadrature: slabs on which the profile is frozen, or Gauss nodes.
enum TimeRule<T> {
    Slabs(Vec<(T, T, usize)>),
    Nodes(Vec<(T, T, usize)>),
}

fn evaluate<T: Scalar, S: SpaceTime<T> + ?Sized>(
    sol: &S,
    window: &Window,
    family: &TestFamily,
    dim: usize,
    g: &dyn Fn(&State<T>) -> State<T>,
    h: &dyn Fn(&State<T>) -> State<T>,
) -> Result<Vec<(TestResidual, State<T>)>> {
    if !(window.t1 > window.t0) || !(window.x1 > window.x0) {
        return Err(Error::InvalidInput("empty verification window".into()));
    }
    let scales = family.scales(window);
    let rho_min = scales.iter().cloned().fold(f64::INFINITY, f64::min);
    if let Some(dx) = sol.resolution() {
        let dx = dx.to_f64_lossy();
        if rho_min < 4.0 * dx * (1.0 - 1e-12) {
            return Err(Error::QuadratureUnderResolved { scale: rho_min, dx });
        }
    }
    let (tau, tau2) = (T::lit(window.t0), T::lit(window.t1));
    let breaks = sol.time_breaks(tau, tau2);
    let mut profiles: Vec<Pieces<T>> = Vec::new();
    let mut push = |t: T| {
        profiles.push(Pieces::new(&sol.profile(t), g, h));
        profiles.len() - 1
    };
    let start = push(tau);
    let rule;
    let end;
    if sol.piecewise_constant_in_time() {
        let mut levels = vec![tau];
        levels.extend(breaks.iter().copied());
        levels.push(tau2);
        let mut slabs = vec![(levels[0], levels[1], start)];
        for w in levels[1..].windows(2) {
            slabs.push((w[0], w[1], push(w[0])));
        }
        end = push(tau2);
        rule = TimeRule::Slabs(slabs);
    } else {
        let sub = rho_min / 16.0;
        let mut cuts: Vec<T> = centers(window.t0, window.t1, sub).into_iter().map(T::lit).collect();
        cuts.extend(breaks.iter().copied());
        // support edges of every bump, so each Gauss panel sees a polynomial
        for &rho in &scales {
            for tc in centers(window.t0, window.t1, rho * family.spacing) {
                for e in [tc - rho, tc + rho] {
                    if e > window.t0 && e < window.t1 {
                        cuts.push(T::lit(e));
                    }
                }
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        let (z, w) = gauss5::<T>();
        let half = T::lit(0.5);
        let mut nodes = Vec::new();
        for c in cuts.windows(2) {
            let (mid, len) = ((c[0] + c[1]) * half, c[1] - c[0]);
            for q in 0..5 {
                let t = mid + z[q] * len * half;
                nodes.push((t, w[q] * len * half, push(t)));
            }
        }
        end = push(tau2);
        rule = TimeRule::Nodes(nodes);
    }
    let mut out = Vec::new();
    for &rho_f in &scales {
        let rho = T::lit(rho_f);
        let norm = TestFamily::w1inf_norm(rho_f);
        let step = rho_f * family.spacing;
        let t_centers = centers(window.t0, window.t1, step);
        for xc in centers(window.x0, window.x1, step) {
            let c = T::lit(xc);
            let mom: Vec<(State<T>, State<T>)> = profiles.iter().map(|p| p.moments(c, rho, dim)).collect();
            for &tc in &t_centers {
                let s = T::lit(tc);
                let b = |t: T| psi((t - s) / rho);
                let bi = |t: T| rho * psi_int((t - s) / rho);
                let mut e = mom[start].0 * b(tau) - mom[end].0 * b(tau2);
                match &rule {
                    TimeRule::Slabs(slabs) => {
                        for &(a, z, p) in slabs {
                            e = e.axpy(b(z) - b(a), &mom[p].0).axpy(bi(z) - bi(a), &mom[p].1);
                        }
                    }
                    TimeRule::Nodes(nodes) => {
                        for &(t, w, p) in nodes {
                            let r = (t - s) / rho;
                            if r.abs() >= T::one() {
                                continue;
                            }
                            e = e.axpy(w * dpsi(r) / rho, &mom[p].0).axpy(w * psi(r), &mom[p].1);
                        }
                    }
                }
                out.push((TestResidual { x: xc, t: tc, scale: rho_f, norm, value: 0.0 }, e));
            }
        }
    }
    Ok(out)
}

/// `∫u(τ)φ(τ) − ∫u(τ′)φ(τ′) + ∫∫ uφ_t + f(u)φ_x` for every bump of the family.
///
/// Space integrals are exact for piecewise constant profiles; in time the
/// solution is integrated exactly between stored levels (grids) or with
/// composite Gauss rules between interactions (front tracking).
pub fn weak_residual<T: Scalar, S: SpaceTime<T> + ?Sized>(
    model: &FluxModel<T>,
    sol: &S,
    window: &Window,
    family: &TestFamily,
) -> Result<StripResidual> {
    let g = |u: &State<T>| *u;
    let h = |u: &State<T>| model.flux(u);
    let raw = evaluate(sol, window, family, model.n, &g, &h)?;
    let tests: Vec<TestResidual> =
        raw.into_iter().map(|(r, e)| TestResidual { value: e.norm().to_f64_lossy(), ..r }).collect();
    Ok(StripResidual { kind: ResidualKind::Weak, window: *window, family: family.describe(window, tests.len()), tests })
}

/// The left side of the entropy inequality for every (nonnegative) bump.
pub fn entropy_residual<T: Scalar, S: SpaceTime<T> + ?Sized>(
    model: &FluxModel<T>,
    sol: &S,
    window: &Window,
    family: &TestFamily,
) -> Result<StripResidual> {
    let ep = model.entropy.as_ref().ok_or(Error::MissingEntropyPair)?;
    let g = |u: &State<T>| State::scalar((ep.eta)(u));
    let h = |u: &State<T>| State::scalar((ep.q)(u));
    let raw = evaluate(sol, window, family, 1, &g, &h)?;
    let tests: Vec<TestResidual> =
        raw.into_iter().map(|(r, e)| TestResidual { value: e[0].to_f64_lossy(), ..r }).collect();
    Ok(StripResidual { kind: ResidualKind::Entropy, window: *window, family: family.describe(window, tests.len()), tests })
}
