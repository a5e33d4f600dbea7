use serde::{Deserialize, Serialize};

use super::ShockBranch;
use crate::error::{Error, Result};
use crate::linalg::State;
use crate::models::FluxModel;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityVerdict<T> {
    pub admissible: bool,
    pub margin: T,
}

impl<T: Scalar> AdmissibilityVerdict<T> {
    fn from_margin(margin: T, tol: T) -> Self {
        Self { admissible: margin >= -tol, margin }
    }
}

/// `‖λ(u⁺ − u⁻) − (f(u⁺) − f(u⁻))‖`.
pub fn rh_residual<T: Scalar>(model: &FluxModel<T>, u_minus: &State<T>, u_plus: &State<T>, lambda: T) -> T {
    ((*u_plus - *u_minus) * lambda - (model.flux(u_plus) - model.flux(u_minus))).norm()
}

/// `min_{s ∈ [0, σ]} λ(s) − λ(σ)` on the scalar secant-speed curve through `u_l`.
pub fn liu_margin_scalar<T: Scalar>(model: &FluxModel<T>, u_l: T, u_r: T, samples: usize) -> T {
    let sigma = u_r - u_l;
    if sigma == T::zero() {
        return T::zero();
    }
    let fl = model.f1(u_l);
    let secant = |u: T| (model.f1(u) - fl) / (u - u_l);
    let target = secant(u_r);
    let mut m = model.df1(u_l) - target;
    let n = samples.max(2);
    for k in 1..=n {
        let u = if k == n { u_r } else { u_l + sigma * T::from_usize_lossy(k) / T::from_usize_lossy(n) };
        m = m.min(secant(u) - target);
    }
    m
}

/// Liu's condition for the jump `(u⁻, u⁺)` on the `i`-shock curve through `u⁻`.
pub fn liu_admissible<T: Scalar>(
    model: &FluxModel<T>,
    u_minus: &State<T>,
    u_plus: &State<T>,
    i: usize,
) -> Result<AdmissibilityVerdict<T>> {
    liu_admissible_with(model, u_minus, u_plus, i, 256)
}

pub(crate) fn liu_admissible_with<T: Scalar>(
    model: &FluxModel<T>,
    u_minus: &State<T>,
    u_plus: &State<T>,
    i: usize,
    samples: usize,
) -> Result<AdmissibilityVerdict<T>> {
    model.check_domain(u_minus)?;
    model.check_domain(u_plus)?;
    let tol = model.tol.adm;
    if u_minus == u_plus {
        return Ok(AdmissibilityVerdict::from_margin(T::zero(), tol));
    }
    if model.n == 1 {
        let m = liu_margin_scalar(model, u_minus[0], u_plus[0], samples);
        return Ok(AdmissibilityVerdict::from_margin(m, tol));
    }
    let e = model.eigensystem(u_minus)?;
    let sigma = e.l(i).dot(&(*u_plus - *u_minus));
    let br = ShockBranch::new(model, u_minus, i, T::one(), T::lit(0.05))?;
    let (end, _) = br.at(sigma)?;
    let miss = (end - *u_plus).norm();
    let slack = model.tol.rh.max(T::lit(1e-8) * (*u_plus - *u_minus).norm());
    if miss > slack {
        return Err(Error::NotOnShockCurve { family: i, residual: miss.to_f64_lossy() });
    }
    let pts = br.trace(sigma, samples)?;
    let target = pts.last().map(|p| p.speed).unwrap_or(T::zero());
    let m = pts.iter().fold(T::infinity(), |m, p| m.min(p.speed - target));
    Ok(AdmissibilityVerdict::from_margin(m, tol))
}

/// Entropy dissipation `λ[η] − [q]` of a jump, without checking Rankine–Hugoniot.
pub fn entropy_margin<T: Scalar>(model: &FluxModel<T>, u_minus: &State<T>, u_plus: &State<T>, lambda: T) -> Result<T> {
    let ep = model.entropy.as_ref().ok_or(Error::MissingEntropyPair)?;
    let deta = (ep.eta)(u_plus) - (ep.eta)(u_minus);
    let dq = (ep.q)(u_plus) - (ep.q)(u_minus);
    Ok(lambda * deta - dq)
}

/// Entropy admissibility of a Rankine–Hugoniot jump.
pub fn entropy_admissible_shock<T: Scalar>(
    model: &FluxModel<T>,
    u_minus: &State<T>,
    u_plus: &State<T>,
    lambda: T,
) -> Result<AdmissibilityVerdict<T>> {
    if model.entropy.is_none() {
        return Err(Error::MissingEntropyPair);
    }
    let rh = rh_residual(model, u_minus, u_plus, lambda);
    let scale = T::one() + model.flux(u_minus).norm_inf().max(model.flux(u_plus).norm_inf());
    if rh > model.tol.rh * scale {
        return Err(Error::RhViolated { residual: rh.to_f64_lossy() });
    }
    let m = entropy_margin(model, u_minus, u_plus, lambda)?;
    Ok(AdmissibilityVerdict::from_margin(m, model.tol.adm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{burgers, psystem};

    fn s(x: f64) -> State<f64> {
        State::scalar(x)
    }

    #[test]
    fn burgers_liu_examples() {
        let m = burgers::<f64>();
        let v = liu_admissible(&m, &s(1.0), &s(0.0), 0).unwrap();
        assert!(v.admissible);
        assert_eq!(v.margin, 0.0);
        let v = liu_admissible(&m, &s(0.0), &s(1.0), 0).unwrap();
        assert!(!v.admissible);
        assert!((v.margin + 0.5).abs() < 1e-15);
        assert_eq!(liu_admissible(&m, &s(0.3), &s(0.3), 0).unwrap().margin, 0.0);
    }

    #[test]
    fn burgers_entropy_examples() {
        let m = burgers::<f64>();
        let v = entropy_admissible_shock(&m, &s(1.0), &s(0.0), 0.5).unwrap();
        assert!(v.admissible && (v.margin - 1.0 / 6.0).abs() < 1e-15);
        let v = entropy_admissible_shock(&m, &s(0.0), &s(1.0), 0.5).unwrap();
        assert!(!v.admissible && (v.margin + 1.0 / 6.0).abs() < 1e-15);
        assert!(matches!(entropy_admissible_shock(&m, &s(1.0), &s(0.0), 0.6), Err(Error::RhViolated { .. })));
    }

    #[test]
    fn rh_residual_examples() {
        let m = burgers::<f64>();
        assert_eq!(rh_residual(&m, &s(1.0), &s(0.0), 0.5), 0.0);
        assert!((rh_residual(&m, &s(1.0), &s(0.0), 0.6) - 0.1).abs() < 1e-15);
        assert_eq!(rh_residual(&m, &s(0.7), &s(0.7), 3.0), 0.0);
    }

    #[test]
    fn psystem_off_curve_is_rejected() {
        let m = psystem::<f64>(1.0, 2.0).unwrap();
        let r = liu_admissible(&m, &State::from_slice(&[1.0, 0.0]), &State::from_slice(&[1.05, 0.02]), 0);
        assert!(matches!(r, Err(Error::NotOnShockCurve { .. })));
    }
}
