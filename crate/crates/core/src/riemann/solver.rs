//! Riemann problems for systems by composing Lax wave curves.

use super::{integral_curve, solve_riemann_scalar_with, RadiusPolicy, RiemannOptions, ShockBranch, Wave, WaveFan};
use crate::error::{Error, Result};
use crate::linalg::{Mat, State};
use crate::models::{lambda_derivative, FluxModel};
use crate::scalar::{Scalar, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum FieldKind<T> {
    /// Genuinely nonlinear; `λ_i` increases along `orient · r_i`.
    Gnl { orient: T },
    Ld,
}

/// `factor · (min eigenvalue gap) / max_k ‖∂_k Df‖` at `ubar`; infinite for linear fluxes.
pub fn small_data_radius<T: Scalar>(model: &FluxModel<T>, ubar: &State<T>, factor: T) -> Result<T> {
    let e = model.eigensystem(ubar)?;
    let mut gap = T::infinity();
    for i in 1..model.n {
        gap = gap.min(e.lambda(i) - e.lambda(i - 1));
    }
    let mut d2 = T::zero();
    for k in 0..model.n {
        let h = T::lit(1e-4) * (T::one() + ubar[k].abs());
        let mut up = *ubar;
        let mut dn = *ubar;
        up[k] = up[k] + h;
        dn[k] = dn[k] - h;
        if !model.domain.contains(&up) || !model.domain.contains(&dn) {
            continue;
        }
        let d: Mat<T> = model.jacobian(&up).sub(&model.jacobian(&dn)).scale(T::one() / (h + h));
        d2 = d2.max(d.norm());
    }
    if d2 <= T::lit(1e-12) {
        return Ok(T::infinity());
    }
    Ok(factor * gap / d2)
}

pub(crate) fn classify_local<T: Scalar>(model: &FluxModel<T>, pts: &[State<T>]) -> Result<Vec<FieldKind<T>>> {
    let tol = model.tol.ld.max(T::lit(1e-7));
    let mut kinds = Vec::with_capacity(model.n);
    for i in 0..model.n {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for u in pts {
            let d = lambda_derivative(model, i, u)?;
            lo = lo.min(d);
            hi = hi.max(d);
        }
        let k = if lo > tol {
            FieldKind::Gnl { orient: T::one() }
        } else if hi < -tol {
            FieldKind::Gnl { orient: -T::one() }
        } else if lo.abs() <= tol && hi.abs() <= tol {
            FieldKind::Ld
        } else {
            return Err(Error::NonClassifiedField { family: i });
        };
        kinds.push(k);
    }
    Ok(kinds)
}

pub fn solve_riemann<T: Scalar>(model: &FluxModel<T>, u_minus: &State<T>, u_plus: &State<T>) -> Result<WaveFan<T>> {
    solve_riemann_with(model, u_minus, u_plus, &RiemannOptions::default())
}

/// Solve the Riemann problem `(u⁻, u⁺)`.
///
/// Scalar models are delegated to the envelope construction; systems use
/// damped Newton on the wave strengths of the composed Lax curves.
pub fn solve_riemann_with<T: Scalar>(
    model: &FluxModel<T>,
    u_minus: &State<T>,
    u_plus: &State<T>,
    opts: &RiemannOptions,
) -> Result<WaveFan<T>> {
    if model.n == 1 {
        return solve_riemann_scalar_with(model, u_minus, u_plus, opts);
    }
    model.check_domain(u_minus)?;
    model.check_domain(u_plus)?;
    let n = model.n;
    if u_minus == u_plus {
        return Ok(WaveFan { u_minus: *u_minus, u_plus: *u_plus, omega: vec![*u_minus; n + 1], waves: Vec::new() });
    }
    let ubar = (*u_minus + *u_plus) * T::lit(0.5);
    let size = (*u_plus - *u_minus).norm();
    let radius = match opts.radius {
        RadiusPolicy::Auto { factor } => small_data_radius(model, &ubar, T::lit(factor))?,
        RadiusPolicy::Fixed(r) => T::lit(r),
        RadiusPolicy::Unlimited => T::infinity(),
    };
    if size > radius {
        return Err(Error::DataTooLarge { size: size.to_f64_lossy(), radius: radius.to_f64_lossy() });
    }
    let kinds = classify_local(model, &[*u_minus, ubar, *u_plus])?;
    let sigma = newton_strengths(model, &kinds, u_minus, u_plus, &ubar, opts)?;
    assemble(model, &kinds, u_minus, u_plus, &sigma, opts)
}

pub(crate) fn curve_end<T: Scalar>(
    model: &FluxModel<T>,
    kind: FieldKind<T>,
    i: usize,
    u: &State<T>,
    sigma: T,
    opts: &RiemannOptions,
) -> Result<State<T>> {
    if sigma == T::zero() {
        return Ok(*u);
    }
    match kind {
        FieldKind::Gnl { orient } if sigma < T::zero() => {
            Ok(ShockBranch::new(model, u, i, orient, T::lit(opts.shock_step))?.at(sigma)?.0)
        }
        FieldKind::Gnl { orient } => {
            let pts = integral_curve(model, u, i, orient, sigma, opts.rarefaction_steps)?;
            Ok(pts.last().map(|p| p.state).unwrap_or(*u))
        }
        FieldKind::Ld => {
            let pts = integral_curve(model, u, i, T::one(), sigma, opts.rarefaction_steps)?;
            Ok(pts.last().map(|p| p.state).unwrap_or(*u))
        }
    }
}

fn compose<T: Scalar>(
    model: &FluxModel<T>,
    kinds: &[FieldKind<T>],
    u_minus: &State<T>,
    sigma: &State<T>,
    opts: &RiemannOptions,
) -> Result<State<T>> {
    let mut u = *u_minus;
    for (i, &k) in kinds.iter().enumerate() {
        u = curve_end(model, k, i, &u, sigma[i], opts)?;
    }
    Ok(u)
}

/// Damped Newton with a forward-difference Jacobian on
/// `Ψ_n(σ_n) ∘ … ∘ Ψ_1(σ_1)(u⁻) = u⁺`.
pub(crate) fn newton_strengths<T: Scalar>(
    model: &FluxModel<T>,
    kinds: &[FieldKind<T>],
    u_minus: &State<T>,
    u_plus: &State<T>,
    ubar: &State<T>,
    opts: &RiemannOptions,
) -> Result<State<T>> {
    newton_on(|s| compose(model, kinds, u_minus, s, opts), model, kinds, u_plus, ubar, opts.max_newton)
}

pub(crate) fn newton_on<T: Scalar>(
    map: impl Fn(&State<T>) -> Result<State<T>>,
    model: &FluxModel<T>,
    kinds: &[FieldKind<T>],
    target: &State<T>,
    ubar: &State<T>,
    max_iter: usize,
) -> Result<State<T>> {
    let n = model.n;
    let tol: Tolerances<T> = model.tol;
    let e = model.eigensystem(ubar)?;
    let u_minus_guess = map(&State::zeros(n))?;
    let mut sigma = State::zeros(n);
    for i in 0..n {
        let o = match kinds[i] {
            FieldKind::Gnl { orient } => orient,
            FieldKind::Ld => T::one(),
        };
        sigma[i] = e.l(i).dot(&(*target - u_minus_guess)) * o;
    }
    let resid = |s: &State<T>| -> Option<(State<T>, T)> {
        let v = map(s).ok()? - *target;
        let r = v.norm_inf();
        r.is_finite().then_some((v, r))
    };
    let (mut f, mut r) = resid(&sigma).ok_or(Error::NewtonDivergence { iterations: 0, residual: f64::INFINITY })?;
    for it in 0..max_iter {
        if r <= tol.rp {
            return Ok(sigma);
        }
        let mut jac = Mat::zeros(n);
        for k in 0..n {
            let h = T::lit(1e-7) * (T::one() + sigma[k].abs());
            let mut sp = sigma;
            sp[k] = sp[k] + h;
            let (fp, _) = resid(&sp).ok_or(Error::NewtonDivergence { iterations: it, residual: r.to_f64_lossy() })?;
            let col = (fp - f) / h;
            for i in 0..n {
                jac[(i, k)] = col[i];
            }
        }
        let delta = jac
            .solve(&(-f))
            .ok_or(Error::NewtonDivergence { iterations: it, residual: r.to_f64_lossy() })?;
        let mut alpha = T::one();
        let mut accepted = false;
        for _ in 0..30 {
            let trial = sigma.axpy(alpha, &delta);
            if let Some((ft, rt)) = resid(&trial) {
                if rt < r {
                    sigma = trial;
                    f = ft;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            alpha = alpha * T::lit(0.5);
        }
        if !accepted {
            if r <= tol.rp * T::lit(10.0) {
                return Ok(sigma);
            }
            return Err(Error::NewtonDivergence { iterations: it, residual: r.to_f64_lossy() });
        }
    }
    if r <= tol.rp {
        Ok(sigma)
    } else {
        Err(Error::NewtonDivergence { iterations: max_iter, residual: r.to_f64_lossy() })
    }
}

fn assemble<T: Scalar>(
    model: &FluxModel<T>,
    kinds: &[FieldKind<T>],
    u_minus: &State<T>,
    u_plus: &State<T>,
    sigma: &State<T>,
    opts: &RiemannOptions,
) -> Result<WaveFan<T>> {
    let n = model.n;
    let mut omega = Vec::with_capacity(n + 1);
    omega.push(*u_minus);
    let mut waves = Vec::new();
    let cut = T::lit(1e-12);
    for (i, &kind) in kinds.iter().enumerate() {
        let u = omega[i];
        let s = sigma[i];
        if s.abs() <= cut {
            omega.push(u);
            continue;
        }
        let last = i + 1 == n;
        match kind {
            FieldKind::Gnl { orient } if s < T::zero() => {
                let br = ShockBranch::new(model, &u, i, orient, T::lit(opts.shock_step))?;
                let (end, speed) = br.at(s)?;
                let pts = br.trace(s, opts.liu_samples.max(2))?;
                let target = pts.last().map(|p| p.speed).unwrap_or(speed);
                let liu = pts.iter().fold(T::infinity(), |m, p| m.min(p.speed - target));
                let end = if last { *u_plus } else { end };
                waves.push(Wave::Shock { family: i, u_l: u, u_r: end, speed, liu_margin: liu });
                omega.push(end);
            }
            FieldKind::Gnl { orient } => {
                let pts = integral_curve(model, &u, i, orient, s, opts.rarefaction_steps)?;
                if pts.windows(2).any(|p| !(p[1].speed > p[0].speed)) {
                    return Err(Error::NotGenuinelyNonlinear { family: i });
                }
                let mut profile: Vec<(T, State<T>)> = pts.iter().map(|p| (p.speed, p.state)).collect();
                let end = if last { *u_plus } else { pts.last().unwrap().state };
                if let Some(p) = profile.last_mut() {
                    p.1 = end;
                }
                waves.push(Wave::Rarefaction {
                    family: i,
                    u_l: u,
                    u_r: end,
                    speed_l: profile[0].0,
                    speed_r: profile.last().unwrap().0,
                    profile,
                });
                omega.push(end);
            }
            FieldKind::Ld => {
                let end = curve_end(model, kind, i, &u, s, opts)?;
                let end = if last { *u_plus } else { end };
                let speed = model.eigensystem(&u)?.lambda(i);
                waves.push(Wave::Contact { family: i, u_l: u, u_r: end, speed });
                omega.push(end);
            }
        }
    }
    if let Some(w) = omega.last_mut() {
        *w = *u_plus;
    }
    Ok(WaveFan { u_minus: *u_minus, u_plus: *u_plus, omega, waves })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{linear2, psystem};
    use crate::riemann::{evaluate_fan, rh_residual};

    #[test]
    fn psystem_two_waves() {
        let m = psystem::<f64>(1.0, 2.0).unwrap();
        let ul = State::from_slice(&[1.0, 0.0]);
        let ur = State::from_slice(&[1.05, 0.02]);
        let fan = solve_riemann(&m, &ul, &ur).unwrap();
        assert_eq!(fan.waves.len(), 2);
        assert_eq!(fan.omega.len(), 3);
        assert!(fan.order_defect() <= 1e-9);
        for w in &fan.waves {
            if let Wave::Shock { u_l, u_r, speed, liu_margin, .. } = w {
                assert!(rh_residual(&m, u_l, u_r, *speed) <= 1e-9);
                assert!(*liu_margin >= -1e-9);
            }
        }
        assert_eq!(evaluate_fan(&fan, -10.0), ul);
        assert_eq!(evaluate_fan(&fan, 10.0), ur);
    }

    #[test]
    fn linear_system_contacts() {
        let m = linear2::<f64>(1.0, 0.0, 0.0, 2.0).unwrap();
        let ul = State::from_slice(&[0.0, 0.0]);
        let ur = State::from_slice(&[1.0, -2.0]);
        let fan = solve_riemann(&m, &ul, &ur).unwrap();
        assert_eq!(fan.waves.len(), 2);
        assert!(fan.waves.iter().all(|w| matches!(w, Wave::Contact { .. })));
        let mid = evaluate_fan(&fan, 1.5);
        assert!((mid - State::from_slice(&[1.0, 0.0])).norm() < 1e-10);
    }

    #[test]
    fn large_data_rejected() {
        let m = psystem::<f64>(1.0, 2.0).unwrap();
        let r = solve_riemann(&m, &State::from_slice(&[1.0, 0.0]), &State::from_slice(&[1.8, 0.9]));
        assert!(matches!(r, Err(Error::DataTooLarge { .. })));
    }
}
