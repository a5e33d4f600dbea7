//! Jin–Xin relaxation `u_t + v_x = 0`, `v_t + a² u_x = −(v − f(u))/ε`.

use super::grid::{fit_steps, Grid, Stepper};
use super::speeds::speed_bound;
use super::{Boundary, GridSolution, InitialData, SchemeConfig};
use crate::error::{Error, Result};
use crate::linalg::State;
use crate::models::FluxModel;
use crate::scalar::Scalar;

/// Upwind transport of the relaxation system followed by an implicit source
/// step. `Δx = cfg.dx` (default `ε/4`), `Δt = Δx/(2a)`; only `u` is stored.
pub fn jin_xin_run<T: Scalar>(model: &FluxModel<T>, data: &InitialData<T>, cfg: &SchemeConfig) -> Result<GridSolution<T>> {
    cfg.validate()?;
    let eps = T::lit(cfg.eps);
    let grid = Grid::<T>::new(cfg.domain, cfg.dx.unwrap_or(cfg.eps / 4.0))?;
    let init = data.cell_averages(grid.x0, grid.dx, grid.n)?;
    if init[0].dim() != model.n {
        return Err(Error::DimensionMismatch { expected: model.n, got: init[0].dim() });
    }
    let lmax = speed_bound(model, &init)?;
    let needed = lmax * lmax;
    let a2 = match cfg.a2 {
        Some(a2) => {
            let a2 = T::lit(a2);
            if a2 < needed * (T::one() - T::lit(1e-12)) {
                return Err(Error::SubcharacteristicViolation { a2: a2.to_f64_lossy(), needed: needed.to_f64_lossy() });
            }
            a2
        }
        None => needed.max(T::one()),
    };
    let a = a2.sqrt();
    let dt_max = grid.dx / (a + a);
    let dt_max = match cfg.dt {
        Some(d) if T::lit(d) > dt_max * (T::one() + T::lit(1e-12)) => {
            return Err(Error::CflViolation(format!("dt = {d} exceeds dx/(2a)")));
        }
        Some(d) => T::lit(d),
        None => dt_max,
    };
    let (n_steps, dt) = fit_steps(T::lit(cfg.t_final), dt_max);
    let lam = dt / grid.dx;
    let ratio = dt / eps;
    let half = T::lit(0.5);
    let n = grid.n;
    let mut v: Vec<State<T>> = init.iter().map(|u| model.flux(u)).collect();
    let mut v_new = v.clone();
    let mut fu = vec![State::zeros(model.n); n + 1];
    let mut fv = vec![State::zeros(model.n); n + 1];
    let boundary = cfg.boundary;
    Stepper { cfg, name: "jin-xin" }.run(grid, dt, n_steps, init, |_, u, u_new, incr| {
        let at = |w: &[State<T>], k: isize| -> State<T> {
            if k < 0 {
                match boundary {
                    Boundary::ConstantExtension => w[0],
                    Boundary::Periodic => w[n - 1],
                }
            } else if k as usize >= n {
                match boundary {
                    Boundary::ConstantExtension => w[n - 1],
                    Boundary::Periodic => w[0],
                }
            } else {
                w[k as usize]
            }
        };
        // face j sits between cells j−1 and j
        for j in 0..=n {
            let (ul, ur) = (at(u, j as isize - 1), at(u, j as isize));
            let (vl, vr) = (at(&v, j as isize - 1), at(&v, j as isize));
            fu[j] = (vl + vr) * half - (ur - ul) * (a * half);
            fv[j] = (ul + ur) * (a2 * half) - (vr - vl) * (a * half);
        }
        for k in 0..n {
            u_new[k] = u[k] - (fu[k + 1] - fu[k]) * lam;
            let vt = v[k] - (fv[k + 1] - fv[k]) * lam;
            v_new[k] = (vt + model.flux(&u_new[k]) * ratio) / (T::one() + ratio);
        }
        std::mem::swap(&mut v, &mut v_new);
        *incr = (fu[0] - fu[n]) * dt;
        Ok(())
    })
}
