//! Shock curves (Rankine–Hugoniot loci) and integral curves of eigenvectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve_dense, State};
use crate::models::{lambda_derivative, FluxModel};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct CurvePoint<T> {
    pub s: T,
    pub state: State<T>,
    /// Shock speed for shock curves, characteristic speed for integral curves.
    pub speed: T,
}

/// Samples of the `i`-shock curve through `base`, parametrized by
/// `s = l_i(base) · (S(s) − base)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct ShockCurve<T> {
    pub family: usize,
    pub base: State<T>,
    pub samples: Vec<CurvePoint<T>>,
}

impl<T: Scalar> ShockCurve<T> {
    pub fn max_rh_residual(&self, model: &FluxModel<T>) -> T {
        self.samples
            .iter()
            .map(|p| super::rh_residual(model, &self.base, &p.state, p.speed))
            .fold(T::zero(), T::max)
    }
}

/// Newton continuation along one shock curve.
///
/// Writing `S = base + s·w` with the closure `l·w = 1`, the unknowns `(w, λ)`
/// solve `(f(base + s w) − f(base))/s − λ w = 0`, which degenerates smoothly to
/// the eigenproblem `A w = λ w` at `s = 0`.
pub(crate) struct ShockBranch<'a, T: Scalar> {
    model: &'a FluxModel<T>,
    base: State<T>,
    f0: State<T>,
    l: State<T>,
    w0: State<T>,
    lam0: T,
    step: T,
}

impl<'a, T: Scalar> ShockBranch<'a, T> {
    /// `orient = ±1` flips the parametrization direction.
    pub fn new(model: &'a FluxModel<T>, base: &State<T>, family: usize, orient: T, step: T) -> Result<Self> {
        let e = model.eigensystem(base)?;
        Ok(Self {
            model,
            base: *base,
            f0: model.flux(base),
            l: *e.l(family) * orient,
            w0: *e.r(family) * orient,
            lam0: e.lambda(family),
            step,
        })
    }

    pub fn at(&self, s: T) -> Result<(State<T>, T)> {
        if s == T::zero() {
            return Ok((self.base, self.lam0));
        }
        if self.model.n == 1 {
            let u = self.base.axpy(s, &self.w0);
            self.model.check_domain(&u).map_err(|_| self.fail(s, "left the domain"))?;
            let lam = (self.model.flux(&u)[0] - self.f0[0]) / (u[0] - self.base[0]);
            return Ok((u, lam));
        }
        let m = (s.abs() / self.step).ceil().to_usize().unwrap_or(1).max(1);
        let mut w = self.w0;
        let mut lam = self.lam0;
        for k in 1..=m {
            let sk = s * T::from_usize_lossy(k) / T::from_usize_lossy(m);
            let (w1, l1) = self.newton(sk, w, lam)?;
            w = w1;
            lam = l1;
        }
        Ok((self.base.axpy(s, &w), lam))
    }

    /// Equally spaced samples on `[0, s_end]`, computed by continuation.
    pub fn trace(&self, s_end: T, n_samples: usize) -> Result<Vec<CurvePoint<T>>> {
        let n_samples = n_samples.max(2);
        let mut out = Vec::with_capacity(n_samples);
        let mut w = self.w0;
        let mut lam = self.lam0;
        out.push(CurvePoint { s: T::zero(), state: self.base, speed: lam });
        let mut s_prev = T::zero();
        for k in 1..n_samples {
            let sk = s_end * T::from_usize_lossy(k) / T::from_usize_lossy(n_samples - 1);
            if self.model.n == 1 {
                let (u, l) = self.at(sk)?;
                out.push(CurvePoint { s: sk, state: u, speed: l });
                continue;
            }
            let sub = ((sk - s_prev).abs() / self.step).ceil().to_usize().unwrap_or(1).max(1);
            for j in 1..=sub {
                let sj = s_prev + (sk - s_prev) * T::from_usize_lossy(j) / T::from_usize_lossy(sub);
                let (w1, l1) = self.newton(sj, w, lam)?;
                w = w1;
                lam = l1;
            }
            out.push(CurvePoint { s: sk, state: self.base.axpy(sk, &w), speed: lam });
            s_prev = sk;
        }
        Ok(out)
    }

    fn fail(&self, s: T, why: &str) -> Error {
        Error::ContinuationFailure { s: s.to_f64_lossy(), reason: why.to_string() }
    }

    fn residual(&self, s: T, w: &State<T>, lam: T) -> Result<State<T>> {
        if s == T::zero() {
            return Ok(self.model.jacobian(&self.base).mul_vec(w) - *w * lam);
        }
        let u = self.base.axpy(s, w);
        self.model.check_domain(&u).map_err(|_| self.fail(s, "left the domain"))?;
        Ok((self.model.flux(&u) - self.f0) / s - *w * lam)
    }

    fn newton(&self, s: T, mut w: State<T>, mut lam: T) -> Result<(State<T>, T)> {
        let n = self.model.n;
        let np = n + 1;
        let scale = T::one() + self.f0.norm_inf() / (T::one() + self.base.norm_inf());
        let eps = T::epsilon();
        for it in 0..40 {
            let g = self.residual(s, &w, lam)?;
            let c = self.l.dot(&w) - T::one();
            let gnorm = g.norm_inf().max(c.abs());
            if !gnorm.is_finite() {
                return Err(self.fail(s, "non-finite residual"));
            }
            let u = self.base.axpy(s, &w);
            let jac = self.model.jacobian(&u);
            let mut a = vec![T::zero(); np * np];
            for i in 0..n {
                for j in 0..n {
                    a[i * np + j] = jac[(i, j)] - if i == j { lam } else { T::zero() };
                }
                a[i * np + n] = -w[i];
                a[n * np + i] = self.l[i];
            }
            let mut rhs: Vec<T> = (0..n).map(|i| -g[i]).collect();
            rhs.push(-c);
            if !solve_dense(&mut a, &mut rhs, np) {
                return Err(self.fail(s, "singular Newton system (hyperbolicity degenerates)"));
            }
            let mut dw = State::zeros(n);
            for i in 0..n {
                dw[i] = rhs[i];
            }
            w += dw;
            lam = lam + rhs[n];
            let step = dw.norm_inf().max(rhs[n].abs());
            // roundoff floor of the secant quotient
            let noise = if s == T::zero() { scale } else { scale + (self.f0.norm_inf() + T::one()) / s.abs() };
            if step <= T::lit(8.0) * eps * (T::one() + w.norm_inf() + lam.abs())
                || (it > 0 && gnorm <= T::lit(16.0) * eps * noise)
            {
                break;
            }
        }
        let u = self.base.axpy(s, &w);
        self.model.check_domain(&u).map_err(|_| self.fail(s, "left the domain"))?;
        let rh = super::rh_residual(self.model, &self.base, &u, lam);
        if rh > self.model.tol.rh * (T::one() + self.f0.norm_inf()) {
            return Err(self.fail(s, "Rankine-Hugoniot residual above tolerance"));
        }
        Ok((w, lam))
    }
}

/// Shock curve of family `i` through `u_minus` sampled at `n_samples` points
/// of `[0, s_max]`.
pub fn shock_curve<T: Scalar>(
    model: &FluxModel<T>,
    u_minus: &State<T>,
    i: usize,
    s_max: T,
    n_samples: usize,
) -> Result<ShockCurve<T>> {
    if i >= model.n {
        return Err(Error::InvalidInput(format!("family {i} out of range")));
    }
    if n_samples < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    let br = ShockBranch::new(model, u_minus, i, T::one(), T::lit(0.05))?;
    Ok(ShockCurve { family: i, base: *u_minus, samples: br.trace(s_max, n_samples)? })
}

/// RK4 integration of `du/ds = orient · r_i(u)` over `[0, s]` in `steps` steps,
/// keeping the eigenvector direction continuous.
pub(crate) fn integral_curve<T: Scalar>(
    model: &FluxModel<T>,
    base: &State<T>,
    family: usize,
    orient: T,
    s: T,
    steps: usize,
) -> Result<Vec<CurvePoint<T>>> {
    let e0 = model.eigensystem(base)?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(CurvePoint { s: T::zero(), state: *base, speed: e0.lambda(family) });
    if s == T::zero() {
        return Ok(out);
    }
    let dir0 = *e0.r(family) * orient * s.signum();
    let h = s.abs() / T::from_usize_lossy(steps);
    let half = T::lit(0.5);
    let field = |u: &State<T>, reference: &State<T>| -> Result<State<T>> {
        let r = *model.eigensystem(u)?.r(family);
        Ok(if r.dot(reference) < T::zero() { -r } else { r })
    };
    let mut u = *base;
    let mut dir = dir0;
    for k in 1..=steps {
        let k1 = field(&u, &dir)?;
        let k2 = field(&u.axpy(h * half, &k1), &k1)?;
        let k3 = field(&u.axpy(h * half, &k2), &k2)?;
        let k4 = field(&u.axpy(h, &k3), &k3)?;
        let incr = (k1 + (k2 + k3) * T::lit(2.0) + k4) * (h / T::lit(6.0));
        u += incr;
        model.check_domain(&u)?;
        dir = k4;
        let lam = model.eigensystem(&u)?.lambda(family);
        out.push(CurvePoint { s: s * T::from_usize_lossy(k) / T::from_usize_lossy(steps), state: u, speed: lam });
    }
    Ok(out)
}

/// Rarefaction curve of family `i` from `u_minus` up to arc length `s ≥ 0`,
/// in the direction in which `λ_i` increases.
pub fn rarefaction_curve<T: Scalar>(
    model: &FluxModel<T>,
    u_minus: &State<T>,
    i: usize,
    s: T,
) -> Result<Vec<CurvePoint<T>>> {
    model.check_domain(u_minus)?;
    if s < T::zero() {
        return Err(Error::InvalidInput("rarefaction extent must be nonnegative".into()));
    }
    if s == T::zero() {
        return Ok(vec![CurvePoint { s, state: *u_minus, speed: model.lambda(i, u_minus)? }]);
    }
    let d = lambda_derivative(model, i, u_minus)?;
    if d.abs() <= model.tol.ld {
        return Err(Error::NotGenuinelyNonlinear { family: i });
    }
    let steps = (s / T::lit(0.005)).ceil().to_usize().unwrap_or(16).max(16);
    let pts = integral_curve(model, u_minus, i, d.signum(), s, steps)?;
    if pts.windows(2).any(|p| !(p[1].speed > p[0].speed)) {
        return Err(Error::NotGenuinelyNonlinear { family: i });
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{burgers, psystem};

    #[test]
    fn burgers_shock_curve_from_zero() {
        let m = burgers::<f64>();
        let c = shock_curve(&m, &State::scalar(0.0), 0, 1.0, 11).unwrap();
        for p in &c.samples {
            assert!((p.speed - p.s / 2.0).abs() < 1e-15);
            assert!((p.state[0] - p.s).abs() < 1e-15);
        }
    }

    #[test]
    fn psystem_shock_curve_is_rh_exact() {
        let m = psystem::<f64>(1.0, 2.0).unwrap();
        let base = State::from_slice(&[1.0, 0.0]);
        let c = shock_curve(&m, &base, 0, 0.5, 21).unwrap();
        assert!(c.max_rh_residual(&m) <= 1e-10);
        // tangent to r_1 at the base point
        let r = *m.eigensystem(&base).unwrap().r(0);
        let h = 1e-6;
        let p = ShockBranch::new(&m, &base, 0, 1.0, 0.05).unwrap().at(h).unwrap().0;
        let tangent = (p - base) / h;
        let l = *m.eigensystem(&base).unwrap().l(0);
        assert!((tangent - r / l.dot(&r)).norm() < 1e-5);
    }

    #[test]
    fn psystem_rarefaction_monotone() {
        let m = psystem::<f64>(1.0, 2.0).unwrap();
        let base = State::from_slice(&[1.0, 0.0]);
        let pts = rarefaction_curve(&m, &base, 1, 0.3).unwrap();
        assert!(pts.windows(2).all(|p| p[1].state[0] < p[0].state[0]));
        assert!(pts.windows(2).all(|p| p[1].speed > p[0].speed));
    }
}
