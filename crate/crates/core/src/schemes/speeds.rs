use crate::error::{Error, Result};
use crate::linalg::State;
use crate::models::FluxModel;
use crate::scalar::Scalar;

/// Check that every characteristic speed at the given states (and, for scalar
/// models, on the whole hull of their values) lies in `[lo, hi]`.
pub(crate) fn check_speed_range<T: Scalar>(model: &FluxModel<T>, states: &[State<T>], lo: T, hi: T) -> Result<()> {
    let slack = T::lit(1e-12) * (T::one() + hi.abs());
    let bad = |s: T| Error::SpeedRangeViolation { speed: s.to_f64_lossy(), lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() };
    if model.n == 1 {
        let (a, b) = states.iter().fold((T::infinity(), T::neg_infinity()), |(a, b), u| (a.min(u[0]), b.max(u[0])));
        let m = 256;
        for k in 0..=m {
            let u = a + (b - a) * T::from_usize_lossy(k) / T::from_usize_lossy(m);
            let s = model.df1(u);
            if !(s >= lo - slack && s <= hi + slack) {
                return Err(bad(s));
            }
        }
        return Ok(());
    }
    for u in states {
        let e = model.eigensystem(u)?;
        for &s in e.lambdas.iter() {
            if !(s >= lo - slack && s <= hi + slack) {
                return Err(bad(s));
            }
        }
    }
    Ok(())
}

/// Largest `|λ_i|` over the states (over their hull for scalar models).
pub(crate) fn speed_bound<T: Scalar>(model: &FluxModel<T>, states: &[State<T>]) -> Result<T> {
    if model.n == 1 {
        let (a, b) = states.iter().fold((T::infinity(), T::neg_infinity()), |(a, b), u| (a.min(u[0]), b.max(u[0])));
        let m = 256;
        return Ok((0..=m)
            .map(|k| model.df1(a + (b - a) * T::from_usize_lossy(k) / T::from_usize_lossy(m)).abs())
            .fold(T::zero(), T::max));
    }
    let mut s = T::zero();
    for u in states {
        s = s.max(model.eigensystem(u)?.lambdas.norm_inf());
    }
    Ok(s)
}

/// Spectral radius of `Df(u)` for scalar or system models.
#[inline]
pub(crate) fn local_speed<T: Scalar>(model: &FluxModel<T>, u: &State<T>) -> Result<T> {
    if model.n == 1 {
        Ok(model.df1(u[0]).abs())
    } else if model.n == 2 {
        let a = model.jacobian(u);
        let half_tr = (a[(0, 0)] + a[(1, 1)]) * T::lit(0.5);
        let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
        let disc = half_tr * half_tr - det;
        if !(disc > T::zero()) {
            // not strictly hyperbolic here; let the eigensolver report why
            return Ok(model.eigensystem(u)?.lambdas.norm_inf());
        }
        Ok(half_tr.abs() + disc.sqrt())
    } else {
        Ok(model.eigensystem(u)?.lambdas.norm_inf())
    }
}
