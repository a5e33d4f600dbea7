//! Scalar characteristics between restarts, followed by mollification.

use super::grid::{fit_steps, Grid, Stepper};
use super::{Boundary, GridSolution, InitialData, MollifierKernel, SchemeConfig};
use crate::error::{Error, Result};
use crate::linalg::State;
use crate::models::FluxModel;
use crate::scalar::Scalar;

impl MollifierKernel {
    /// Unnormalized profile on `|r| < 1`.
    pub fn profile(&self, r: f64) -> f64 {
        let s = 1.0 - r * r;
        if s <= 0.0 {
            return 0.0;
        }
        match self {
            MollifierKernel::Polynomial => s * s * s,
            MollifierKernel::Exponential => (-1.0 / s).exp(),
        }
    }
}

/// `1/max(0, −min_k Δ_k f′(u)/Δx)` over neighbouring cells (∞ if nothing compresses).
pub fn blowup_time<T: Scalar>(model: &FluxModel<T>, cells: &[State<T>], dx: T) -> T {
    let c: Vec<T> = cells.iter().map(|u| model.df1(u[0])).collect();
    let min_slope = c.windows(2).map(|w| (w[1] - w[0]) / dx).fold(T::zero(), T::min);
    if min_slope < T::zero() {
        -T::one() / min_slope
    } else {
        T::infinity()
    }
}

/// Restarts every `ε` (the step is shortened to hit `t_final` evenly). Each
/// step advances the piecewise-linear interpolant of the cells by exact
/// characteristics, in conservative form, then
/// convolves with the kernel of half-width `cfg.mollifier_width`
/// (default `4Δx`). `Δx = cfg.dx`, default `ε/10`.
pub fn mollification_run<T: Scalar>(model: &FluxModel<T>, data: &InitialData<T>, cfg: &SchemeConfig) -> Result<GridSolution<T>> {
    cfg.validate()?;
    if model.n != 1 {
        return Err(Error::InvalidModel("mollification is implemented for scalar models only".into()));
    }
    let dx_f = cfg.dx.unwrap_or(cfg.eps / 10.0);
    let grid = Grid::<T>::new(cfg.domain, dx_f)?;
    let init = data.cell_averages(grid.x0, grid.dx, grid.n)?;
    if init[0].dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: init[0].dim() });
    }
    let width = cfg.mollifier_width.unwrap_or(4.0 * dx_f);
    let (n_steps, dt) = fit_steps(T::lit(cfg.t_final), T::lit(cfg.eps));
    let weights = kernel_weights::<T>(cfg.kernel, width, dx_f);
    let n = grid.n;
    let (x0, dx) = (grid.x0, grid.dx);
    let boundary = cfg.boundary;
    let half = T::lit(0.5);
    let mut fluxes = vec![T::zero(); n + 1];
    let mut prefix = vec![T::zero(); n];
    let mut moved = vec![T::zero(); n];
    Stepper { cfg, name: "mollification" }.run(grid, dt, n_steps, init, |_, old, new, incr| {
        let tb = blowup_time(model, old, dx);
        if dt >= tb {
            return Err(Error::BlowupBeforeRestart { step: dt.to_f64_lossy(), t_blowup: tb.to_f64_lossy() });
        }
        let u: Vec<T> = old.iter().map(|s| s[0]).collect();
        let speeds: Vec<T> = u.iter().map(|&v| model.df1(v)).collect();
        let (cmin, cmax) = speeds.iter().fold((T::infinity(), T::neg_infinity()), |(a, b), &c| (a.min(c), b.max(c)));
        // piecewise-linear interpolant through the cell centres and its antiderivative from x0
        let u0 = |y: T| -> T {
            let s = (y - x0) / dx - half;
            if s <= T::zero() {
                return u[0];
            }
            let k = s.floor().to_usize().unwrap_or(usize::MAX);
            if k >= n - 1 {
                return u[n - 1];
            }
            let th = s - T::from_usize_lossy(k);
            u[k] + (u[k + 1] - u[k]) * th
        };
        prefix[0] = u[0] * dx * half;
        for k in 0..n - 1 {
            prefix[k + 1] = prefix[k] + (u[k] + u[k + 1]) * dx * half;
        }
        let antiderivative = |y: T| -> T {
            let c0 = x0 + dx * half;
            if y <= c0 {
                return u[0] * (y - x0);
            }
            let k = ((y - c0) / dx).floor().to_usize().unwrap_or(usize::MAX).min(n - 1);
            let h = y - (c0 + dx * T::from_usize_lossy(k));
            if k == n - 1 {
                return prefix[k] + u[k] * h;
            }
            prefix[k] + u[k] * h + (u[k + 1] - u[k]) * h * h / (dx + dx)
        };
        // time-integrated face flux of the classical solution: the mass between
        // the face and the characteristic reaching it at dt, corrected along that line
        for (jf, fl) in fluxes.iter_mut().enumerate() {
            let xf = x0 + dx * T::from_usize_lossy(jf);
            let (mut lo, mut hi) = (xf - dt * cmax, xf - dt * cmin);
            for _ in 0..200 {
                let mid = (lo + hi) * half;
                if mid + dt * model.df1(u0(mid)) < xf {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= T::epsilon() * (T::one() + xf.abs()) {
                    break;
                }
            }
            let y = (lo + hi) * half;
            let us = u0(y);
            *fl = antiderivative(xf) - antiderivative(y) + dt * (model.f1(us) - us * model.df1(us));
        }
        if boundary == Boundary::Periodic {
            // a single face flux keeps the periodic update conservative
            let f = (fluxes[0] + fluxes[n]) * half;
            fluxes[0] = f;
            fluxes[n] = f;
        }
        for k in 0..n {
            moved[k] = u[k] - (fluxes[k + 1] - fluxes[k]) / dx;
        }
        let m = (weights.len() - 1) / 2;
        for k in 0..n {
            let mut acc = T::zero();
            for (i, w) in weights.iter().enumerate() {
                let idx = k as isize + i as isize - m as isize;
                let v = if idx < 0 {
                    match boundary {
                        Boundary::ConstantExtension => moved[0],
                        Boundary::Periodic => moved[(idx.rem_euclid(n as isize)) as usize],
                    }
                } else if idx as usize >= n {
                    match boundary {
                        Boundary::ConstantExtension => moved[n - 1],
                        Boundary::Periodic => moved[(idx as usize) % n],
                    }
                } else {
                    moved[idx as usize]
                };
                acc = acc + *w * v;
            }
            new[k] = State::scalar(acc);
        }
        *incr = State::scalar(fluxes[0] - fluxes[n]);
        Ok(())
    })
}

fn kernel_weights<T: Scalar>(kernel: MollifierKernel, width: f64, dx: f64) -> Vec<T> {
    let m = (width / dx).floor().max(0.0) as usize;
    if m == 0 {
        return vec![T::one()];
    }
    let raw: Vec<f64> = (0..=2 * m).map(|i| kernel.profile((i as f64 - m as f64) * dx / width)).collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|w| T::lit(w / z)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::burgers;
    use crate::schemes::PiecewiseConstantFn;

    #[test]
    fn constant_stays_constant() {
        let m = burgers::<f64>();
        let data: InitialData<f64> = PiecewiseConstantFn::constant(State::scalar(0.3)).into();
        let cfg = SchemeConfig { eps: 0.1, t_final: 0.5, ..Default::default() };
        let sol = mollification_run(&m, &data, &cfg).unwrap();
        assert!(sol.last().cells.iter().all(|u| (u[0] - 0.3).abs() < 1e-14));
    }

    #[test]
    fn blowup_time_of_a_ramp() {
        let m = burgers::<f64>();
        let dx = 0.01;
        let cells: Vec<State<f64>> = (0..200).map(|k| State::scalar(1.0 - (k as f64 + 0.5) * dx)).collect();
        assert!((blowup_time(&m, &cells, dx) - 1.0).abs() < 1e-9);
    }
}
