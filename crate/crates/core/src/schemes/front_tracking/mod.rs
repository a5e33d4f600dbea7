//! Wave-front tracking.
//!
//! Scalar models with a polynomial flux run in exact rational arithmetic;
//! other scalar models and all systems use the scalar type of the model.

mod engine;
mod exact;
mod scalar;
mod system;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

pub use exact::{decimal_rational, FrontNumber};

use self::engine::{track, Tracked};
use self::scalar::track_scalar;
use self::system::SystemSolver;
use super::speeds::speed_bound;
use super::{PiecewiseConstantFn, SchemeConfig};
use crate::error::{Error, Result};
use crate::linalg::State;
use crate::models::FluxModel;
use crate::riemann::{rh_residual, RiemannOptions};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontKind {
    Shock,
    RarefactionPiece,
    Contact,
    NonPhysical,
}

/// A straight front, alive on `[t_birth, t_death)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct Front<T> {
    pub kind: FrontKind,
    pub family: Option<usize>,
    pub u_l: State<T>,
    pub u_r: State<T>,
    pub speed: T,
    pub x_birth: T,
    pub t_birth: T,
    pub t_death: Option<T>,
}

impl<T: Scalar> Front<T> {
    pub fn position(&self, t: T) -> T {
        self.x_birth + self.speed * (t - self.t_birth)
    }

    pub fn is_alive(&self, t: T) -> bool {
        self.t_birth <= t && self.t_death.map_or(true, |d| t < d)
    }

    pub fn strength(&self) -> T {
        (self.u_r - self.u_l).norm()
    }

    pub fn is_physical(&self) -> bool {
        self.kind != FrontKind::NonPhysical
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct Interaction<T> {
    pub t: T,
    pub x: T,
    /// Indices into [`FrontTrackingSolution::fronts`].
    pub incoming: Vec<usize>,
    pub outgoing: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct FrontTrackingSolution<T> {
    /// State to the left of every front.
    pub u_far_left: State<T>,
    pub t_final: T,
    pub fronts: Vec<Front<T>>,
    pub interactions: Vec<Interaction<T>>,
    /// Whether positions and speeds were computed in exact rational arithmetic.
    pub exact: bool,
}

impl<T: Scalar> FrontTrackingSolution<T> {
    pub fn event_times(&self) -> Vec<T> {
        self.interactions.iter().map(|e| e.t).collect()
    }

    /// Fronts alive at `t`, left to right.
    pub fn fronts_at(&self, t: T) -> Vec<&Front<T>> {
        let mut v: Vec<(usize, &Front<T>)> = self.fronts.iter().enumerate().filter(|(_, f)| f.is_alive(t)).collect();
        // creation order breaks ties between fronts issued from one point
        v.sort_by(|(i, a), (j, b)| a.position(t).partial_cmp(&b.position(t)).unwrap().then(i.cmp(j)));
        v.into_iter().map(|(_, f)| f).collect()
    }

    /// The approximate solution at time `t`.
    pub fn at(&self, t: T) -> PiecewiseConstantFn<T> {
        let fronts = self.fronts_at(t);
        let mut bps: Vec<T> = Vec::with_capacity(fronts.len());
        let mut vals = vec![self.u_far_left];
        for f in fronts {
            let x = f.position(t);
            if bps.last() == Some(&x) {
                *vals.last_mut().unwrap() = f.u_r;
            } else {
                bps.push(x);
                vals.push(f.u_r);
            }
        }
        PiecewiseConstantFn::new(bps, vals).expect("fronts are ordered").simplify()
    }

    pub fn max_front_count(&self) -> usize {
        let mut times = vec![T::zero()];
        times.extend(self.event_times());
        times.iter().map(|&t| self.fronts_at(t).len()).max().unwrap_or(0)
    }

    /// Largest `rh_residual` over all physical fronts ever created.
    pub fn max_rh_residual(&self, model: &FluxModel<T>) -> T {
        self.fronts
            .iter()
            .filter(|f| f.is_physical())
            .map(|f| rh_residual(model, &f.u_l, &f.u_r, f.speed))
            .fold(T::zero(), T::max)
    }

    /// Total strength of the non-physical fronts alive at `t`.
    pub fn nonphysical_strength(&self, t: T) -> T {
        self.fronts_at(t).iter().filter(|f| !f.is_physical()).map(|f| f.strength()).fold(T::zero(), |a, b| a + b)
    }
}

/// Front tracking up to `cfg.t_final` with accuracy `cfg.delta`.
pub fn front_tracking_run<T: Scalar>(
    model: &FluxModel<T>,
    data: &PiecewiseConstantFn<T>,
    cfg: &SchemeConfig,
) -> Result<FrontTrackingSolution<T>> {
    cfg.validate()?;
    if data.dim() != model.n {
        return Err(Error::DimensionMismatch { expected: model.n, got: data.dim() });
    }
    for u in data.values() {
        model.check_domain(u)?;
    }
    if model.n == 1 {
        if let Some(coeffs) = &model.poly {
            return scalar_run::<T, BigRational>(model, data, cfg, Some(coeffs));
        }
        return scalar_run::<T, T>(model, data, cfg, None);
    }
    system_run(model, data, cfg)
}

fn conv<E: FrontNumber>(x: f64) -> Result<E> {
    E::from_f64(x).ok_or_else(|| Error::InvalidInput(format!("{x} is not a finite number")))
}

fn scalar_run<T: Scalar, E: FrontNumber>(
    model: &FluxModel<T>,
    data: &PiecewiseConstantFn<T>,
    cfg: &SchemeConfig,
    poly: Option<&Vec<f64>>,
) -> Result<FrontTrackingSolution<T>> {
    let bps: Vec<E> = data.breakpoints().iter().map(|x| conv(x.to_f64_lossy())).collect::<Result<_>>()?;
    let vals: Vec<E> = data.values().iter().map(|u| conv(u[0].to_f64_lossy())).collect::<Result<_>>()?;
    let coeffs: Option<Vec<E>> = poly.map(|c| c.iter().map(|&x| conv(x)).collect::<Result<_>>()).transpose()?;
    let flux = |u: &E| -> E {
        match &coeffs {
            Some(c) => c.iter().rev().fold(E::zero(), |acc, a| acc * u.clone() + a.clone()),
            None => conv(model.f1(T::lit(u.to_f64())).to_f64_lossy()).unwrap_or_else(|_| E::zero()),
        }
    };
    let dflux = |u: f64| model.df1(T::lit(u)).to_f64_lossy();
    let delta: E = conv(cfg.delta)?;
    let t_final: E = conv(cfg.t_final)?;
    let (lattice, tracked) = track_scalar(&flux, &dflux, &bps, &vals, &delta, &t_final, cfg.front_cap)?;
    let to_t = |x: &E| T::lit(x.to_f64());
    let state = |i: &usize| State::scalar(to_t(&lattice.nodes[*i]));
    Ok(finish(tracked, data.left_state(), T::lit(cfg.t_final), E::EXACT, to_t, state))
}

fn system_run<T: Scalar>(model: &FluxModel<T>, data: &PiecewiseConstantFn<T>, cfg: &SchemeConfig) -> Result<FrontTrackingSolution<T>> {
    let np_speed = T::one() + speed_bound(model, data.values())?;
    let solver = SystemSolver {
        model,
        opts: RiemannOptions { liu_samples: 2, ..Default::default() },
        delta: T::lit(cfg.delta),
        rho_np: T::lit(cfg.rho_np),
        np_speed,
    };
    let tracked = track(data.breakpoints(), data.values(), &T::lit(cfg.t_final), cfg.front_cap, |a, b| solver.solve(a, b))?;
    Ok(finish(tracked, data.left_state(), T::lit(cfg.t_final), false, |x: &T| *x, |s: &State<T>| *s))
}

fn finish<T: Scalar, E: FrontNumber, S>(
    tracked: Tracked<E, S>,
    u_far_left: State<T>,
    t_final: T,
    exact: bool,
    to_t: impl Fn(&E) -> T,
    state: impl Fn(&S) -> State<T>,
) -> FrontTrackingSolution<T> {
    let fronts = tracked
        .fronts
        .iter()
        .map(|f| Front {
            kind: f.kind,
            family: f.family,
            u_l: state(&f.u_l),
            u_r: state(&f.u_r),
            speed: to_t(&f.speed),
            x_birth: to_t(&f.x_birth),
            t_birth: to_t(&f.t_birth),
            t_death: f.t_death.as_ref().map(&to_t),
        })
        .collect();
    let interactions = tracked
        .events
        .iter()
        .map(|e| Interaction { t: to_t(&e.t), x: to_t(&e.x), incoming: e.incoming.clone(), outgoing: e.outgoing.clone() })
        .collect();
    FrontTrackingSolution { u_far_left, t_final, fronts, interactions, exact }
}
