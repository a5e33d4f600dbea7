use crate::error::{Error, Result};
use crate::linalg::State;
use crate::models::FluxModel;
use crate::riemann::{newton_on, FieldKind, ShockBranch};
use crate::schemes::PiecewiseConstantFn;
use crate::scalar::Scalar;

/// Strengths `q_i(x)` of the shock-curve path from `u(x)` to `v(x)`, one
/// vector per piece of the common refinement of `u` and `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct QDecomposition<T> {
    pub breakpoints: Vec<T>,
    pub strengths: Vec<State<T>>,
    /// `Σ_i ∫ |q_i| dx`.
    pub phi0: T,
    /// `‖v − u‖_{L¹}` on the same pieces.
    pub l1: T,
}

/// `ω_0 = u, ω_i = S_i(ω_{i−1}; q_i)` with `ω_n = v`, solved by Newton.
pub fn strengths_between<T: Scalar>(model: &FluxModel<T>, u: &State<T>, v: &State<T>) -> Result<State<T>> {
    if u == v {
        return Ok(State::zeros(model.n));
    }
    if model.n == 1 {
        let br = ShockBranch::new(model, u, 0, T::one(), T::lit(0.05))?;
        let (end, _) = br.at(T::one())?;
        return Ok(State::scalar((v[0] - u[0]) / (end[0] - u[0])));
    }
    let kinds = vec![FieldKind::Ld; model.n];
    let map = |q: &State<T>| -> Result<State<T>> {
        let mut w = *u;
        for i in 0..model.n {
            let br = ShockBranch::new(model, &w, i, T::one(), T::lit(0.05))?;
            w = br.at(q[i])?.0;
        }
        Ok(w)
    };
    newton_on(map, model, &kinds, v, u, 60)
}

pub fn q_decomposition<T: Scalar>(
    model: &FluxModel<T>,
    u: &PiecewiseConstantFn<T>,
    v: &PiecewiseConstantFn<T>,
) -> Result<QDecomposition<T>> {
    if u.dim() != model.n || v.dim() != model.n {
        return Err(Error::DimensionMismatch { expected: model.n, got: u.dim().max(v.dim()) });
    }
    let mut bps: Vec<T> = u.breakpoints().iter().chain(v.breakpoints()).copied().collect();
    bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bps.dedup();
    let mut strengths = Vec::with_capacity(bps.len() + 1);
    let (mut phi0, mut l1) = (T::zero(), T::zero());
    for j in 0..=bps.len() {
        let x = if j == 0 {
            bps.first().map_or(T::zero(), |&b| b - T::one())
        } else {
            bps[j - 1]
        };
        let (a, b) = (u.eval(x), v.eval(x));
        let q = strengths_between(model, &a, &b)?;
        if j > 0 && j < bps.len() {
            let len = bps[j] - bps[j - 1];
            phi0 = phi0 + q.norm1() * len;
            l1 = l1 + (b - a).norm() * len;
        } else if a != b {
            phi0 = T::infinity();
            l1 = T::infinity();
        }
        strengths.push(q);
    }
    Ok(QDecomposition { breakpoints: bps, strengths, phi0, l1 })
}
