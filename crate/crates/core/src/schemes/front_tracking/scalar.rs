//! Scalar front tracking: the flux is replaced by its piecewise linear
//! interpolant on a lattice of spacing `δ` (plus the data values), so every
//! Riemann problem is solved exactly by a convex or concave hull and all
//! fronts travel at Rankine–Hugoniot secant speeds.

use super::engine::{track, Piece, Tracked};
use super::exact::FrontNumber;
use super::FrontKind;
use crate::error::{Error, Result};

pub(crate) struct Lattice<E> {
    pub nodes: Vec<E>,
    pub fluxes: Vec<E>,
}

const MAX_NODES: i64 = 2_000_000;

impl<E: FrontNumber> Lattice<E> {
    pub fn new(values: &[E], delta: &E, flux: &dyn Fn(&E) -> E) -> Result<Self> {
        let lo = values.iter().cloned().reduce(|a, b| if b < a { b } else { a }).expect("nonempty data");
        let hi = values.iter().cloned().reduce(|a, b| if b > a { b } else { a }).expect("nonempty data");
        let k0 = -((-(lo.clone() / delta.clone())).floor_i64());
        let k1 = (hi.clone() / delta.clone()).floor_i64();
        if k1 - k0 > MAX_NODES {
            return Err(Error::InvalidInput(format!("delta too small for the data range ({} lattice nodes)", k1 - k0)));
        }
        let mut nodes: Vec<E> = (k0..=k1).map(|k| E::from_i64(k) * delta.clone()).collect();
        nodes.extend(values.iter().cloned());
        nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite lattice values"));
        nodes.dedup();
        let fluxes = nodes.iter().map(flux).collect();
        Ok(Self { nodes, fluxes })
    }

    pub fn index(&self, u: &E) -> usize {
        let k = self.nodes.partition_point(|x| x < u);
        debug_assert!(self.nodes[k] == *u);
        k
    }

    fn slope(&self, a: usize, b: usize) -> E {
        (self.fluxes[b].clone() - self.fluxes[a].clone()) / (self.nodes[b].clone() - self.nodes[a].clone())
    }

    /// Entropy solution of the Riemann problem for the interpolated flux:
    /// the lower convex hull (`u_l < u_r`) or upper concave hull (`u_l > u_r`).
    pub fn riemann(&self, il: usize, ir: usize, dflux: &dyn Fn(f64) -> f64) -> Vec<Piece<E, usize>> {
        if il == ir {
            return Vec::new();
        }
        let path: Vec<usize> = if il < ir { (il..=ir).collect() } else { (ir..=il).rev().collect() };
        let mut hull: Vec<usize> = vec![path[0]];
        for &j in &path[1..] {
            while hull.len() >= 2 {
                let m = hull.len();
                if self.slope(hull[m - 2], hull[m - 1]) >= self.slope(hull[m - 1], j) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(j);
        }
        hull.windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let (ca, cb) = (dflux(self.nodes[a].to_f64()), dflux(self.nodes[b].to_f64()));
                let kind = if (ca - cb).abs() <= 1e-12 * (1.0 + ca.abs().max(cb.abs())) {
                    FrontKind::Contact
                } else if a.abs_diff(b) == 1 && ca < cb {
                    FrontKind::RarefactionPiece
                } else {
                    FrontKind::Shock
                };
                Piece { kind, family: Some(0), u_l: a, u_r: b, speed: self.slope(a, b) }
            })
            .collect()
    }
}

pub(crate) fn track_scalar<E: FrontNumber>(
    flux: &dyn Fn(&E) -> E,
    dflux: &dyn Fn(f64) -> f64,
    breakpoints: &[E],
    values: &[E],
    delta: &E,
    t_final: &E,
    cap: usize,
) -> Result<(Lattice<E>, Tracked<E, usize>)> {
    let lattice = Lattice::new(values, delta, flux)?;
    let idx: Vec<usize> = values.iter().map(|v| lattice.index(v)).collect();
    let tracked = track(breakpoints, &idx, t_final, cap, |&a, &b| Ok(lattice.riemann(a, b, dflux)))?;
    Ok((lattice, tracked))
}
