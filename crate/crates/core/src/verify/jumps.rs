use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::State;
use crate::models::FluxModel;
use crate::riemann::{entropy_margin, liu_admissible, liu_margin_scalar, rh_residual};
use crate::schemes::{GridSolution, PiecewiseConstantFn};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JumpOptions {
    /// Window radius; `10Δx` by default.
    pub radius: Option<f64>,
    /// Smallest jump size reported.
    pub threshold: f64,
    /// Largest accepted `(1/r²)∫∫|u − U|`, relative to the jump size.
    pub max_defect: f64,
    /// Number of snapshots, centred on `t`, used to fit the speed.
    pub time_window: usize,
}

impl Default for JumpOptions {
    fn default() -> Self {
        Self { radius: None, threshold: 0.05, max_defect: 0.5, time_window: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct JumpRecord<T> {
    pub tau: T,
    pub xi: T,
    pub u_minus: State<T>,
    pub u_plus: State<T>,
    pub lambda: T,
    pub rh_residual: T,
    pub liu_margin: Option<T>,
    pub entropy_margin: Option<T>,
    pub radius: T,
    /// `(1/r²)∫∫_{[−r,r]²} |u(τ+t, ξ+x) − U(t, x)|` over the stored levels.
    pub defect: T,
}

impl<T: Scalar> JumpRecord<T> {
    pub fn size(&self) -> T {
        (self.u_plus - self.u_minus).norm()
    }
}

/// Location of the step `u⁻ → u⁺` inside `[c − r, c + r]` that reproduces
/// the mass of `u` projected on `u⁺ − u⁻`.
fn locate<T: Scalar>(u: &PiecewiseConstantFn<T>, c: T, r: T, um: &State<T>, up: &State<T>) -> T {
    let d = *up - *um;
    let m = u.integral(c - r, c + r) - *um * (r + r);
    let s = d.dot(&m) / d.dot(&d);
    (c + r - s).max(c - r).min(c + r)
}

/// Points of approximate jump of a grid solution at the snapshot nearest `t`.
pub fn detect_jumps<T: Scalar>(
    model: &FluxModel<T>,
    sol: &GridSolution<T>,
    t: T,
    opts: &JumpOptions,
) -> Result<Vec<JumpRecord<T>>> {
    let dx = sol.dx;
    let r = opts.radius.map(T::lit).unwrap_or(dx * T::lit(10.0));
    if r < dx * T::lit(2.0) * (T::one() - T::lit(1e-9)) {
        return Err(Error::InvalidInput(format!("window radius {} is below 2dx", r.to_f64_lossy())));
    }
    let k = (0..sol.snapshots.len())
        .min_by(|&a, &b| (sol.snapshots[a].t - t).abs().partial_cmp(&(sol.snapshots[b].t - t).abs()).unwrap())
        .expect("grid solution has snapshots");
    let snap = &sol.snapshots[k];
    let tau = snap.t;
    let cells = &snap.cells;
    let n = cells.len();
    let m = (r / dx).round().to_usize().unwrap_or(2).max(2);
    if n < 2 * m + 1 {
        return Ok(Vec::new());
    }
    let half = T::lit(0.5);
    let threshold = T::lit(opts.threshold);
    let mut prefix = vec![State::zeros(model.n)];
    for c in cells {
        let last = *prefix.last().unwrap();
        prefix.push(last + *c);
    }
    let inv_m = T::one() / T::from_usize_lossy(m);
    let jump_at = |j: usize| ((prefix[j + m] - prefix[j]) - (prefix[j] - prefix[j - m])) * inv_m;

    // runs of faces whose one-sided averages differ by more than the threshold
    let mut peaks = Vec::new();
    let mut j = m;
    while j <= n - m {
        if jump_at(j).norm() > threshold {
            let mut best = (jump_at(j).norm(), j);
            while j <= n - m && jump_at(j).norm() > threshold {
                best = if jump_at(j).norm() > best.0 { (jump_at(j).norm(), j) } else { best };
                j += 1;
            }
            peaks.push(best.1);
        }
        j += 1;
    }

    let lo_t = k.saturating_sub(opts.time_window / 2);
    let hi_t = (k + opts.time_window / 2).min(sol.snapshots.len() - 1);
    let pcs: Vec<(T, PiecewiseConstantFn<T>)> =
        (lo_t..=hi_t).map(|i| (sol.snapshots[i].t, sol.to_pc(&sol.snapshots[i]))).collect();
    let here = &pcs[k - lo_t].1;

    let mut out: Vec<JumpRecord<T>> = Vec::new();
    for face in peaks {
        let c0 = sol.x0 + dx * T::from_usize_lossy(face);
        let mut um = (prefix[face] - prefix[face - m]) * inv_m;
        let mut up = (prefix[face + m] - prefix[face]) * inv_m;
        let mut xi = locate(here, c0, r, &um, &up);
        // outer half-windows avoid the smeared core of the layer
        for _ in 0..2 {
            um = here.average(xi - r, xi - r * half);
            up = here.average(xi + r * half, xi + r);
            if (up - um).norm() <= threshold {
                break;
            }
            xi = locate(here, xi, r, &um, &up);
        }
        let size = (up - um).norm();
        if size <= threshold {
            continue;
        }
        let d = up - um;
        let lam0 = d.dot(&(model.flux(&up) - model.flux(&um))) / d.dot(&d);
        let lambda = if pcs.len() >= 2 {
            let pts: Vec<(T, T)> = pcs
                .iter()
                .map(|(ti, u)| (*ti - tau, locate(u, xi + lam0 * (*ti - tau), r, &um, &up)))
                .collect();
            let np = T::from_usize_lossy(pts.len());
            let mt = pts.iter().fold(T::zero(), |a, p| a + p.0) / np;
            let mx = pts.iter().fold(T::zero(), |a, p| a + p.1) / np;
            let stt = pts.iter().fold(T::zero(), |a, p| a + (p.0 - mt) * (p.0 - mt));
            let stx = pts.iter().fold(T::zero(), |a, p| a + (p.0 - mt) * (p.1 - mx));
            if stt > T::zero() {
                stx / stt
            } else {
                lam0
            }
        } else {
            lam0
        };
        let mut acc = T::zero();
        let mut cnt = 0usize;
        for (ti, u) in &pcs {
            let dt = *ti - tau;
            if dt.abs() <= r {
                let step = PiecewiseConstantFn::riemann(xi + lambda * dt, um, up);
                acc = acc + u.l1_distance(&step, xi - r, xi + r);
                cnt += 1;
            }
        }
        // mean over the stored levels of the spatial distance, times 2r / r²
        let defect = acc / T::from_usize_lossy(cnt.max(1)) * T::lit(2.0) / r;
        if defect > T::lit(opts.max_defect) * size {
            continue;
        }
        if let Some(prev) = out.last() {
            if (xi - prev.xi).abs() < r + r {
                if size > prev.size() {
                    out.pop();
                } else {
                    continue;
                }
            }
        }
        let liu = if model.n == 1 {
            Some(liu_margin_scalar(model, um[0], up[0], 256))
        } else {
            let ubar = (um + up) * half;
            model.eigensystem(&ubar).ok().and_then(|e| {
                let fam = (0..model.n)
                    .min_by(|&a, &b| (e.lambda(a) - lambda).abs().partial_cmp(&(e.lambda(b) - lambda).abs()).unwrap())?;
                liu_admissible(model, &um, &up, fam).ok().map(|v| v.margin)
            })
        };
        out.push(JumpRecord {
            tau,
            xi,
            u_minus: um,
            u_plus: up,
            lambda,
            rh_residual: rh_residual(model, &um, &up, lambda),
            liu_margin: liu,
            entropy_margin: entropy_margin(model, &um, &up, lambda).ok(),
            radius: r,
            defect,
        });
    }
    Ok(out)
}
