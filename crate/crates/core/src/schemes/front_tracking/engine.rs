//! Event loop shared by the scalar and system front-tracking schemes.

use super::exact::FrontNumber;
use super::FrontKind;
use crate::error::{Error, Result};

/// A front `x(t) = p + s t` alive on `[t_birth, t_death)`.
#[derive(Debug, Clone)]
pub(crate) struct RawFront<E, S> {
    pub kind: FrontKind,
    pub family: Option<usize>,
    pub u_l: S,
    pub u_r: S,
    pub speed: E,
    pub intercept: E,
    pub x_birth: E,
    pub t_birth: E,
    pub t_death: Option<E>,
}

#[derive(Debug, Clone)]
pub(crate) struct RawEvent<E> {
    pub t: E,
    pub x: E,
    pub incoming: Vec<usize>,
    pub outgoing: Vec<usize>,
}

/// Outgoing front of an approximate Riemann solver, in left-to-right order.
pub(crate) struct Piece<E, S> {
    pub kind: FrontKind,
    pub family: Option<usize>,
    pub u_l: S,
    pub u_r: S,
    pub speed: E,
}

pub(crate) struct Tracked<E, S> {
    pub fronts: Vec<RawFront<E, S>>,
    pub events: Vec<RawEvent<E>>,
}

fn same_point<E: FrontNumber>(a: &E, b: &E) -> bool {
    if E::EXACT {
        a == b
    } else {
        let (a, b) = (a.to_f64(), b.to_f64());
        (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
    }
}

/// Runs interactions in time order up to `t_final`. Among simultaneous
/// collisions the leftmost is processed first; all fronts meeting at that
/// point form one Riemann problem.
pub(crate) fn track<E: FrontNumber, S: Clone>(
    breakpoints: &[E],
    values: &[S],
    t_final: &E,
    cap: usize,
    mut solve: impl FnMut(&S, &S) -> Result<Vec<Piece<E, S>>>,
) -> Result<Tracked<E, S>> {
    let mut fronts: Vec<RawFront<E, S>> = Vec::new();
    let mut events: Vec<RawEvent<E>> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let spawn = |fronts: &mut Vec<RawFront<E, S>>, pieces: Vec<Piece<E, S>>, t: &E, x: &E| -> Vec<usize> {
        pieces
            .into_iter()
            .map(|p| {
                let intercept = x.clone() - p.speed.clone() * t.clone();
                fronts.push(RawFront {
                    kind: p.kind,
                    family: p.family,
                    u_l: p.u_l,
                    u_r: p.u_r,
                    speed: p.speed,
                    intercept,
                    x_birth: x.clone(),
                    t_birth: t.clone(),
                    t_death: None,
                });
                fronts.len() - 1
            })
            .collect()
    };
    let zero = E::zero();
    for (j, x) in breakpoints.iter().enumerate() {
        let pieces = solve(&values[j], &values[j + 1])?;
        let ids = spawn(&mut fronts, pieces, &zero, x);
        active.extend(ids);
    }
    if active.len() > cap {
        return Err(Error::FrontExplosion { count: active.len(), cap });
    }
    let max_events = cap.saturating_mul(100).max(1000);
    let mut now = E::zero();
    while active.len() >= 2 {
        let mut best: Option<(E, usize)> = None;
        for i in 0..active.len() - 1 {
            let (a, b) = (&fronts[active[i]], &fronts[active[i + 1]]);
            if a.speed > b.speed {
                let mut t = (b.intercept.clone() - a.intercept.clone()) / (a.speed.clone() - b.speed.clone());
                if t < now {
                    t = now.clone();
                }
                if best.as_ref().map_or(true, |(tb, _)| t < *tb) {
                    best = Some((t, i));
                }
            }
        }
        let Some((t, i)) = best else { break };
        if t > *t_final {
            break;
        }
        let a = &fronts[active[i]];
        let x = a.intercept.clone() + a.speed.clone() * t.clone();
        let mut j = i + 1;
        while j + 1 < active.len() {
            let f = &fronts[active[j + 1]];
            if same_point(&(f.intercept.clone() + f.speed.clone() * t.clone()), &x) {
                j += 1;
            } else {
                break;
            }
        }
        let ul = fronts[active[i]].u_l.clone();
        let ur = fronts[active[j]].u_r.clone();
        let pieces = solve(&ul, &ur)?;
        let incoming: Vec<usize> = active[i..=j].to_vec();
        for &id in &incoming {
            fronts[id].t_death = Some(t.clone());
        }
        let outgoing = spawn(&mut fronts, pieces, &t, &x);
        active.splice(i..=j, outgoing.iter().copied());
        events.push(RawEvent { t: t.clone(), x, incoming, outgoing });
        now = t;
        if active.len() > cap {
            return Err(Error::FrontExplosion { count: active.len(), cap });
        }
        if events.len() > max_events {
            return Err(Error::FrontExplosion { count: events.len(), cap: max_events });
        }
    }
    Ok(Tracked { fronts, events })
}
