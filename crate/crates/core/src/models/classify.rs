use serde::{Deserialize, Serialize};

use super::FluxModel;
use crate::error::{Error, Result};
use crate::linalg::{Mat, State};
use crate::scalar::{fd_step_at, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldTag {
    GenuinelyNonlinear,
    LinearlyDegenerate,
    Neither,
}

/// Classification of a characteristic field over a sample set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldClass {
    pub family: usize,
    pub tag: FieldTag,
    /// Extremes of `∇λ_i · r_i` over the samples.
    pub min: f64,
    pub max: f64,
    /// `+1` if `∇λ_i·r_i > 0` with the normalized eigenvector, `−1` if it is
    /// negative everywhere (the field is still genuinely nonlinear, with `r_i`
    /// reversed), `0` otherwise.
    pub orientation: i8,
}

impl FieldClass {
    pub fn is_gnl(&self) -> bool {
        self.tag == FieldTag::GenuinelyNonlinear
    }
    pub fn is_ld(&self) -> bool {
        self.tag == FieldTag::LinearlyDegenerate
    }
}

/// `∇λ_i(u) · r_i(u)` by central differences along `r_i`.
pub(crate) fn lambda_derivative<T: Scalar>(model: &FluxModel<T>, i: usize, u: &State<T>) -> Result<T> {
    let e = model.eigensystem(u)?;
    let r = *e.r(i);
    let h = fd_step_at(u.norm_inf());
    let lp = model.lambda(i, &u.axpy(h, &r))?;
    let lm = model.lambda(i, &u.axpy(-h, &r))?;
    Ok((lp - lm) / (h + h))
}

pub fn classify_field<T: Scalar>(model: &FluxModel<T>, i: usize, samples: &[State<T>]) -> Result<FieldClass> {
    if i >= model.n {
        return Err(Error::InvalidInput(format!("family {i} out of range for n = {}", model.n)));
    }
    if samples.is_empty() {
        return Err(Error::InvalidInput("empty sample set".into()));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for u in samples {
        let d = lambda_derivative(model, i, u)?.to_f64_lossy();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    let tol = model.tol.ld.to_f64_lossy();
    let (tag, orientation) = if lo > tol {
        (FieldTag::GenuinelyNonlinear, 1)
    } else if hi < -tol {
        (FieldTag::GenuinelyNonlinear, -1)
    } else if lo.abs() <= tol && hi.abs() <= tol {
        (FieldTag::LinearlyDegenerate, 0)
    } else {
        (FieldTag::Neither, 0)
    };
    Ok(FieldClass { family: i, tag, min: lo, max: hi, orientation })
}

fn grad<T: Scalar>(g: &dyn Fn(&State<T>) -> T, u: &State<T>) -> State<T> {
    let mut d = State::zeros(u.dim());
    for k in 0..u.dim() {
        let h = fd_step_at(u[k]);
        let mut up = *u;
        let mut dn = *u;
        up[k] = up[k] + h;
        dn[k] = dn[k] - h;
        d[k] = (g(&up) - g(&dn)) / (h + h);
    }
    d
}

/// `max ‖Dη·Df − Dq‖` over the samples, derivatives by central differences.
pub fn entropy_compatibility_residual<T: Scalar>(model: &FluxModel<T>, samples: &[State<T>]) -> Result<T> {
    let ep = model.entropy.as_ref().ok_or(Error::MissingEntropyPair)?;
    let mut worst = T::zero();
    for u in samples {
        let deta = grad(&*ep.eta, u);
        let dq = grad(&*ep.q, u);
        let a = model.jacobian(u);
        worst = worst.max((a.vec_mul(&deta) - dq).norm());
    }
    Ok(worst)
}

/// Smallest eigenvalue of the finite-difference Hessian of `η` over the samples.
///
/// Positive for a strictly convex entropy.
pub fn entropy_hessian_min_eigenvalue<T: Scalar>(model: &FluxModel<T>, samples: &[State<T>]) -> Result<T> {
    let ep = model.entropy.as_ref().ok_or(Error::MissingEntropyPair)?;
    let n = model.n;
    let mut worst = T::infinity();
    let h = T::lit(1e-4).max(T::fd_step());
    for u in samples {
        let mut hess = Mat::zeros(n);
        for a in 0..n {
            for b in 0..n {
                let e = |sa: T, sb: T| {
                    let mut w = *u;
                    w[a] = w[a] + sa * h;
                    w[b] = w[b] + sb * h;
                    (ep.eta)(&w)
                };
                let one = T::one();
                hess[(a, b)] = (e(one, one) - e(one, -one) - e(-one, one) + e(-one, -one)) / (T::lit(4.0) * h * h);
            }
        }
        // symmetrize, then Gershgorin-free exact path: the Hessian is symmetric
        // so its eigenvalues are real
        let sym = hess.add(&hess.transpose()).scale(T::lit(0.5));
        let m = min_sym_eigenvalue(&sym);
        worst = worst.min(m);
    }
    Ok(worst)
}

fn min_sym_eigenvalue<T: Scalar>(a: &Mat<T>) -> T {
    let n = a.dim();
    match n {
        1 => a[(0, 0)],
        2 => super::eigen::eig2(a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)])
            .map(|(l, _)| l)
            .unwrap_or(T::neg_infinity()),
        _ => {
            // Cholesky succeeds iff positive definite; bisect on the shift
            let pd = |s: T| cholesky_ok(&a.sub(&Mat::identity(n).scale(s)));
            let bound = a.norm();
            let (mut lo, mut hi) = (-bound - T::one(), bound + T::one());
            for _ in 0..80 {
                let mid = (lo + hi) * T::lit(0.5);
                if pd(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        }
    }
}

fn cholesky_ok<T: Scalar>(a: &Mat<T>) -> bool {
    let n = a.dim();
    let mut l = Mat::zeros(n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d = d - l[(j, k)] * l[(j, k)];
        }
        if !(d > T::zero()) {
            return false;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{advection, burgers, cubic, psystem};

    fn line(a: f64, b: f64, n: usize) -> Vec<State<f64>> {
        (0..n).map(|k| State::scalar(a + (b - a) * k as f64 / (n - 1) as f64)).collect()
    }

    #[test]
    fn classification_examples() {
        let s = line(-1.0, 1.0, 21);
        assert!(classify_field(&burgers::<f64>(), 0, &s).unwrap().is_gnl());
        assert!(classify_field(&advection::<f64>(0.7), 0, &s).unwrap().is_ld());
        let c = classify_field(&cubic::<f64>(), 0, &s).unwrap();
        assert_eq!(c.tag, FieldTag::Neither);
        assert!(c.min < 0.0 && c.max > 0.0);
    }

    #[test]
    fn psystem_fields_are_gnl() {
        let p = psystem::<f64>(1.0, 2.0).unwrap();
        let s = p.domain.samples(11);
        let f1 = classify_field(&p, 0, &s).unwrap();
        let f2 = classify_field(&p, 1, &s).unwrap();
        assert!(f1.is_gnl() && f2.is_gnl());
        assert_eq!(f1.orientation, 1);
        assert_eq!(f2.orientation, -1);
    }

    #[test]
    fn wrong_entropy_flux_has_unit_residual() {
        let m = burgers::<f64>().with_entropy(|u| u[0] * u[0], |u| u[0].powi(3), true);
        let r = entropy_compatibility_residual(&m, &[State::scalar(1.0)]).unwrap();
        assert!((r - 1.0).abs() < 1e-8);
    }

    #[test]
    fn entropy_hessians_are_positive() {
        let p = psystem::<f64>(1.0, 2.0).unwrap();
        let s = p.domain.samples(7);
        assert!(entropy_hessian_min_eigenvalue(&p, &s).unwrap() > 0.0);
        assert!((entropy_hessian_min_eigenvalue(&burgers::<f64>(), &line(-2.0, 2.0, 5)).unwrap() - 2.0).abs() < 1e-5);
    }
}
