//! Reference evolutions and the instantaneous error decomposition.

use serde::{Deserialize, Serialize};

use super::space_time::SpaceTime;
use super::tv::interval_partition;
use crate::error::{Error, Result};
use crate::linalg::State;
use crate::models::FluxModel;
use crate::riemann::solve_riemann;
use crate::schemes::{godunov_run, PiecewiseConstantFn, SchemeConfig};
use crate::scalar::Scalar;

/// A reference evolution `S_h`.
pub trait Oracle<T: Scalar> {
    fn evolve(&self, u: &PiecewiseConstantFn<T>, h: T) -> Result<PiecewiseConstantFn<T>>;
    /// Nominal accuracy, reported next to every oracle-based diagnostic.
    fn tolerance(&self) -> f64;
}

/// Exact evolution of constant or single Riemann data. Rarefactions are
/// sampled at cell midpoints of width `dx`.
pub struct FanOracle<'m, T> {
    pub model: &'m FluxModel<T>,
    pub dx: f64,
}

impl<T: Scalar> Oracle<T> for FanOracle<'_, T> {
    fn evolve(&self, u: &PiecewiseConstantFn<T>, h: T) -> Result<PiecewiseConstantFn<T>> {
        let u = u.simplify();
        if u.breakpoints().is_empty() || h <= T::zero() {
            return Ok(u);
        }
        if u.breakpoints().len() > 1 {
            return Err(Error::OracleUnavailable(format!(
                "exact fan evolution needs a single jump, got {}",
                u.breakpoints().len()
            )));
        }
        let x0 = u.breakpoints()[0];
        let fan = solve_riemann(self.model, &u.left_state(), &u.right_state())?;
        let mut bps = Vec::new();
        let mut vals = vec![fan.u_minus];
        for w in &fan.waves {
            if w.is_jump() {
                bps.push(x0 + w.speed_l() * h);
                vals.push(*w.u_r());
            } else {
                let (a, b) = (x0 + w.speed_l() * h, x0 + w.speed_r() * h);
                let n = ((b - a) / T::lit(self.dx)).ceil().to_usize().unwrap_or(1).max(1);
                let step = (b - a) / T::from_usize_lossy(n);
                for k in 0..n {
                    let xa = a + step * T::from_usize_lossy(k);
                    bps.push(xa);
                    vals.push(fan.evaluate((xa + step * T::lit(0.5) - x0) / h));
                }
                bps.push(b);
                vals.push(*w.u_r());
            }
        }
        // coincident fronts keep the rightmost value
        let mut cb: Vec<T> = Vec::with_capacity(bps.len());
        let mut cv = vec![vals[0]];
        for (x, v) in bps.into_iter().zip(vals.into_iter().skip(1)) {
            if cb.last().is_some_and(|&l| x <= l) {
                *cv.last_mut().unwrap() = v;
            } else {
                cb.push(x);
                cv.push(v);
            }
        }
        Ok(PiecewiseConstantFn::new(cb, cv)?.simplify())
    }

    fn tolerance(&self) -> f64 {
        self.dx
    }
}

/// Godunov on a fine grid (`Δt = Δx ≤ dx`) over a fixed domain. The model
/// must have speeds in `[0, 1]`.
pub struct GodunovOracle<'m, T> {
    pub model: &'m FluxModel<T>,
    pub domain: (f64, f64),
    pub dx: f64,
}

impl<'m, T: Scalar> GodunovOracle<'m, T> {
    /// `refinement` times finer than `base_dx`.
    pub fn refined(model: &'m FluxModel<T>, domain: (f64, f64), base_dx: f64, refinement: usize) -> Self {
        Self { model, domain, dx: base_dx / refinement.max(1) as f64 }
    }
}

impl<T: Scalar> Oracle<T> for GodunovOracle<'_, T> {
    fn evolve(&self, u: &PiecewiseConstantFn<T>, h: T) -> Result<PiecewiseConstantFn<T>> {
        let hf = h.to_f64_lossy();
        if hf <= 0.0 {
            return Ok(u.clone());
        }
        let steps = (hf / self.dx - 1e-9).ceil().max(1.0);
        let cfg = SchemeConfig { eps: hf / steps, t_final: hf, domain: self.domain, max_snapshots: 2, ..Default::default() };
        let sol = godunov_run(self.model, &u.clone().into(), &cfg)
            .map_err(|e| Error::OracleUnavailable(format!("fine-grid Godunov failed: {e}")))?;
        Ok(sol.to_pc(sol.last()))
    }

    fn tolerance(&self) -> f64 {
        self.dx
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTerms {
    pub h: f64,
    /// `(1/h)∫_{x_k−h}^{x_k+h} |u(τ+h) − S_h u(τ)|` per interior partition point.
    pub a: Vec<f64>,
    /// `(1/h)∫ |u(τ+h) − U_k(τ+h)|` and `(1/h)∫ |U_k(τ+h) − S_h u(τ)|` on the same windows.
    pub a_solution: Vec<f64>,
    pub a_oracle: Vec<f64>,
    /// `(1/h)∫_{x_{k−1}+h}^{x_k−h} |u(τ+h) − S_h u(τ)|` per interval.
    pub b: Vec<f64>,
    pub b_solution: Vec<f64>,
    pub b_oracle: Vec<f64>,
    /// `(1/h)∫ |u(τ+h) − S_h u(τ)|` over the whole domain.
    pub direct: f64,
}

impl DecompositionTerms {
    pub fn total(&self) -> f64 {
        self.a.iter().chain(&self.b).sum()
    }

    /// Bound of the direct rate through the comparison functions `U_k`, `W_k`.
    pub fn comparison_total(&self) -> f64 {
        self.a_solution.iter().chain(&self.a_oracle).chain(&self.b_solution).chain(&self.b_oracle).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpAt {
    pub x: f64,
    pub u_minus: Vec<f64>,
    pub u_plus: Vec<f64>,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorDecomposition {
    pub tau: f64,
    pub eps: f64,
    pub domain: (f64, f64),
    /// Interior partition points `x_1 < … < x_{N−1}`.
    pub partition: Vec<f64>,
    pub jumps: Vec<JumpAt>,
    pub terms: Vec<DecompositionTerms>,
    /// `(t, V(t))` per interval, `V(t)` the variation on `]x_{k−1}+(t−τ), x_k−(t−τ)[`.
    pub v_samples: Vec<Vec<(f64, f64)>>,
    /// Fraction of samples with `V > 2ε`.
    pub v_exceed_fraction: f64,
    pub oracle_tolerance: f64,
}

/// Right and left values at a breakpoint of a piecewise constant function.
fn sides<T: Scalar>(u: &PiecewiseConstantFn<T>, x: T) -> (State<T>, State<T>) {
    let j = u.breakpoints().partition_point(|&b| b < x);
    (u.values()[j], u.eval(x))
}

/// `w_t + A w_x = 0`, `w(0) = u`, with `A = Df(ū)`: eigencomponents of `u`
/// translated along their characteristics.
fn linear_evolution<T: Scalar>(model: &FluxModel<T>, u: &PiecewiseConstantFn<T>, ubar: &State<T>, h: T) -> Result<PiecewiseConstantFn<T>> {
    let e = model.eigensystem(ubar)?;
    let n = model.n;
    let mut bps: Vec<T> = Vec::new();
    for i in 0..n {
        bps.extend(u.breakpoints().iter().map(|&b| b + h * e.lambda(i)));
    }
    bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bps.dedup();
    let at = |x: T| -> State<T> {
        let mut w = State::zeros(n);
        for i in 0..n {
            let c = e.l(i).dot(&u.eval(x - h * e.lambda(i)));
            w = w.axpy(c, e.r(i));
        }
        w
    };
    let mut vals = Vec::with_capacity(bps.len() + 1);
    if bps.is_empty() {
        return Ok(PiecewiseConstantFn::constant(u.left_state()));
    }
    vals.push(u.left_state());
    for j in 0..bps.len() {
        vals.push(if j + 1 < bps.len() { at((bps[j] + bps[j + 1]) * T::lit(0.5)) } else { u.right_state() });
    }
    Ok(PiecewiseConstantFn::new(bps, vals)?.simplify())
}

/// Splits `u(τ)` into intervals of variation `< ε` and measures the terms of
/// `‖u(τ+h) − S_h u(τ)‖/h = Σ A_k(h) + Σ B_k(h)` on `domain` for every `h`.
pub fn error_decomposition<T: Scalar, S: SpaceTime<T> + ?Sized>(
    model: &FluxModel<T>,
    sol: &S,
    oracle: &dyn Oracle<T>,
    tau: T,
    eps: T,
    hs: &[T],
    domain: (f64, f64),
) -> Result<ErrorDecomposition> {
    let (lo, hi) = (T::lit(domain.0), T::lit(domain.1));
    let u_tau = sol.profile(tau);
    let points: Vec<T> = interval_partition(&u_tau, eps).into_iter().filter(|&x| x > lo && x < hi).collect();
    let mut edges = vec![lo];
    edges.extend(points.iter().copied());
    edges.push(hi);
    let jumps: Vec<(T, State<T>, State<T>, T)> = points
        .iter()
        .map(|&x| {
            let (um, up) = sides(&u_tau, x);
            let d = up - um;
            let dd = d.dot(&d);
            let lam = if dd > T::zero() { d.dot(&(model.flux(&up) - model.flux(&um))) / dd } else { T::zero() };
            (x, um, up, lam)
        })
        .collect();
    let half = T::lit(0.5);
    let mut terms = Vec::new();
    for &h in hs {
        let u_h = sol.profile(tau + h);
        let s_h = oracle.evolve(&u_tau, h)?;
        let inv = T::one() / h;
        let direct = (u_h.l1_distance(&s_h, lo, hi) * inv).to_f64_lossy();
        let mut t = DecompositionTerms {
            h: h.to_f64_lossy(),
            a: vec![],
            a_solution: vec![],
            a_oracle: vec![],
            b: vec![],
            b_solution: vec![],
            b_oracle: vec![],
            direct,
        };
        for (x, um, up, lam) in &jumps {
            let (a, b) = (*x - h, *x + h);
            let step = PiecewiseConstantFn::riemann(*x + *lam * h, *um, *up);
            t.a.push((u_h.l1_distance(&s_h, a, b) * inv).to_f64_lossy());
            t.a_solution.push((u_h.l1_distance(&step, a, b) * inv).to_f64_lossy());
            t.a_oracle.push((step.l1_distance(&s_h, a, b) * inv).to_f64_lossy());
        }
        for k in 1..edges.len() {
            let a = if k == 1 { edges[0] } else { edges[k - 1] + h };
            let b = if k == edges.len() - 1 { edges[k] } else { edges[k] - h };
            if !(b > a) {
                for v in [&mut t.b, &mut t.b_solution, &mut t.b_oracle] {
                    v.push(0.0);
                }
                continue;
            }
            let y = (edges[k - 1] + edges[k]) * half;
            let w = linear_evolution(model, &u_tau, &u_tau.eval(y), h)?;
            t.b.push((u_h.l1_distance(&s_h, a, b) * inv).to_f64_lossy());
            t.b_solution.push((u_h.l1_distance(&w, a, b) * inv).to_f64_lossy());
            t.b_oracle.push((w.l1_distance(&s_h, a, b) * inv).to_f64_lossy());
        }
        terms.push(t);
    }
    let h_max = hs.iter().copied().fold(T::zero(), T::max);
    let mut v_samples = Vec::new();
    let mut over = 0usize;
    let mut count = 0usize;
    for k in 1..edges.len() {
        let mut row = Vec::new();
        for j in 0..=8 {
            let dt = h_max * T::from_usize_lossy(j) / T::lit(8.0);
            let a = if k == 1 { edges[0] } else { edges[k - 1] + dt };
            let b = if k == edges.len() - 1 { edges[k] } else { edges[k] - dt };
            if !(b > a) {
                break;
            }
            // closed interval: jumps on the moving ends are counted
            let v = sol.profile(tau + dt).total_variation_on(a, b).to_f64_lossy();
            count += 1;
            if v > 2.0 * eps.to_f64_lossy() {
                over += 1;
            }
            row.push(((tau + dt).to_f64_lossy(), v));
        }
        v_samples.push(row);
    }
    Ok(ErrorDecomposition {
        tau: tau.to_f64_lossy(),
        eps: eps.to_f64_lossy(),
        domain,
        partition: points.iter().map(|x| x.to_f64_lossy()).collect(),
        jumps: jumps
            .iter()
            .map(|(x, um, up, l)| JumpAt {
                x: x.to_f64_lossy(),
                u_minus: um.to_f64_vec(),
                u_plus: up.to_f64_vec(),
                lambda: l.to_f64_lossy(),
            })
            .collect(),
        terms,
        v_samples,
        v_exceed_fraction: if count == 0 { 0.0 } else { over as f64 / count as f64 },
        oracle_tolerance: oracle.tolerance(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemigroupBound {
    /// `L Σ_j ‖u(t_{j+1}) − S_{t_{j+1}−t_j} u(t_j)‖_{L¹}`.
    pub bound: f64,
    /// `‖u(T) − S_T u(0)‖_{L¹}`.
    pub actual: f64,
    pub terms: Vec<f64>,
    pub oracle_tolerance: f64,
}

/// Riemann-sum form of the error formula for a trajectory sampled at the
/// times of `path`, with L¹ norms taken over `interval`.
pub fn semigroup_error_bound<T: Scalar>(
    path: &[(T, PiecewiseConstantFn<T>)],
    oracle: &dyn Oracle<T>,
    lipschitz: f64,
    interval: (f64, f64),
) -> Result<SemigroupBound> {
    if path.len() < 2 {
        return Err(Error::InvalidInput("a trajectory needs at least two times".into()));
    }
    if path.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidInput("trajectory times must increase".into()));
    }
    let (lo, hi) = (T::lit(interval.0), T::lit(interval.1));
    let mut terms = Vec::with_capacity(path.len() - 1);
    for w in path.windows(2) {
        let s = oracle.evolve(&w[0].1, w[1].0 - w[0].0)?;
        terms.push(w[1].1.l1_distance(&s, lo, hi).to_f64_lossy());
    }
    let (t0, u0) = &path[0];
    let (t1, u1) = path.last().unwrap();
    let actual = u1.l1_distance(&oracle.evolve(u0, *t1 - *t0)?, lo, hi).to_f64_lossy();
    Ok(SemigroupBound { bound: lipschitz * terms.iter().sum::<f64>(), actual, terms, oracle_tolerance: oracle.tolerance() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::linear2;

    #[test]
    fn linear_evolution_translates_characteristic_fields() {
        let m = linear2::<f64>(0.0, 1.0, 1.0, 0.0).unwrap();
        let u = PiecewiseConstantFn::riemann(0.0, State::from_f64s(&[1.0, 1.0]), State::from_f64s(&[0.0, 0.0]));
        // (1, 1) is the eigenvector of speed 1
        let w = linear_evolution(&m, &u, &State::zeros(2), 0.5).unwrap();
        assert!((w.eval(0.25) - State::from_f64s(&[1.0, 1.0])).norm() < 1e-12);
        assert!(w.eval(0.75).norm() < 1e-12);
    }
}
