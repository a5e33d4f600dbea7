//! Approximate Riemann solver for systems: every wave becomes a staircase of
//! jumps along Hugoniot loci, so each physical front satisfies the
//! Rankine–Hugoniot relation up to Newton tolerance.

use super::engine::Piece;
use super::FrontKind;
use crate::error::{Error, Result};
use crate::linalg::State;
use crate::models::FluxModel;
use crate::riemann::{classify_local, newton_on, solve_riemann_with, FieldKind, RiemannOptions, ShockBranch, Wave};
use crate::scalar::Scalar;

pub(crate) struct SystemSolver<'m, T: Scalar> {
    pub model: &'m FluxModel<T>,
    pub opts: RiemannOptions,
    pub delta: T,
    pub rho_np: T,
    pub np_speed: T,
}

impl<'m, T: Scalar> SystemSolver<'m, T> {
    fn orient(kind: FieldKind<T>) -> T {
        match kind {
            FieldKind::Gnl { orient } => orient,
            FieldKind::Ld => T::one(),
        }
    }

    fn steps(&self, kinds: &[FieldKind<T>], u: &State<T>, sigma: &State<T>, m: &[usize]) -> Result<Vec<Vec<(State<T>, State<T>, T)>>> {
        let shock_step = T::lit(self.opts.shock_step);
        let mut c = *u;
        let mut out = Vec::with_capacity(kinds.len());
        for (i, &k) in kinds.iter().enumerate() {
            let mut fam = Vec::new();
            if sigma[i] != T::zero() {
                let h = sigma[i] / T::from_usize_lossy(m[i]);
                for _ in 0..m[i] {
                    let (next, speed) = ShockBranch::new(self.model, &c, i, Self::orient(k), shock_step)?.at(h)?;
                    fam.push((c, next, speed));
                    c = next;
                }
            }
            out.push(fam);
        }
        Ok(out)
    }

    pub fn solve(&self, ul: &State<T>, ur: &State<T>) -> Result<Vec<Piece<T, State<T>>>> {
        if ul == ur {
            return Ok(Vec::new());
        }
        let model = self.model;
        let fail = |e: Error| Error::RiemannFailure(e.to_string());
        let exact = solve_riemann_with(model, ul, ur, &self.opts).map_err(fail)?;
        let ubar = (*ul + *ur) * T::lit(0.5);
        let kinds = classify_local(model, &[*ul, ubar, *ur]).map_err(fail)?;
        let mut m = vec![1usize; model.n];
        for w in &exact.waves {
            if let Wave::Rarefaction { family, u_l, u_r, .. } = w {
                let size = (*u_r - *u_l).norm();
                m[*family] = (size / self.delta).ceil().to_usize().unwrap_or(1).max(1);
            }
        }
        let end = |s: &State<T>| -> Result<State<T>> {
            let st = self.steps(&kinds, ul, s, &m)?;
            Ok(st.iter().rev().find_map(|f| f.last().map(|p| p.1)).unwrap_or(*ul))
        };
        let sigma = newton_on(end, model, &kinds, ur, &ubar, self.opts.max_newton).map_err(fail)?;
        let mut dropped = false;
        let mut kept = sigma;
        for i in 0..model.n {
            if kept[i].abs() < self.rho_np || kept[i].abs() <= T::lit(1e-12) {
                dropped |= kept[i] != T::zero();
                kept[i] = T::zero();
            }
        }
        let st = self.steps(&kinds, ul, &kept, &m).map_err(fail)?;
        let mut pieces = Vec::new();
        for (i, fam) in st.into_iter().enumerate() {
            for (a, b, speed) in fam {
                let kind = match kinds[i] {
                    FieldKind::Ld => FrontKind::Contact,
                    _ if kept[i] < T::zero() => FrontKind::Shock,
                    _ => FrontKind::RarefactionPiece,
                };
                pieces.push(Piece { kind, family: Some(i), u_l: a, u_r: b, speed });
            }
        }
        let last = pieces.last().map(|p| p.u_r).unwrap_or(*ul);
        if dropped {
            if last != *ur {
                pieces.push(Piece { kind: FrontKind::NonPhysical, family: None, u_l: last, u_r: *ur, speed: self.np_speed });
            }
        } else if let Some(p) = pieces.last_mut() {
            p.u_r = *ur;
        }
        Ok(pieces)
    }
}
