//! Semi-discrete upwind system `dU_k/dt = (f(U_{k−1}) − f(U_k))/ε` integrated with RK4.

use super::grid::{fit_steps, ghosts, Grid, Stepper};
use super::speeds::check_speed_range;
use super::{GridSolution, InitialData, SchemeConfig};
use crate::error::{Error, Result};
use crate::linalg::State;
use crate::models::FluxModel;
use crate::scalar::Scalar;

pub fn method_of_lines_run<T: Scalar>(model: &FluxModel<T>, data: &InitialData<T>, cfg: &SchemeConfig) -> Result<GridSolution<T>> {
    cfg.validate()?;
    let grid = Grid::<T>::new(cfg.domain, cfg.eps)?;
    let init = data.cell_averages(grid.x0, grid.dx, grid.n)?;
    if init[0].dim() != model.n {
        return Err(Error::DimensionMismatch { expected: model.n, got: init[0].dim() });
    }
    check_speed_range(model, &init, T::zero(), T::one())?;
    let dt_max = grid.dx * T::lit(0.5);
    let dt_max = match cfg.dt {
        Some(d) if T::lit(d) > dt_max => {
            return Err(Error::CflViolation(format!("dt = {d} exceeds 0.5·eps")));
        }
        Some(d) => T::lit(d),
        None => dt_max,
    };
    let (n_steps, dt) = fit_steps(T::lit(cfg.t_final), dt_max);
    let inv = T::one() / grid.dx;
    let boundary = cfg.boundary;
    // right side and boundary flux difference f(ghost) − f(U_last)
    let rhs = |u: &[State<T>], out: &mut Vec<State<T>>| -> State<T> {
        let (gl, _) = ghosts(u, boundary);
        let mut f_prev = model.flux(&gl);
        let f_in = f_prev;
        for k in 0..u.len() {
            let f = model.flux(&u[k]);
            out[k] = (f_prev - f) * inv;
            f_prev = f;
        }
        f_in - f_prev
    };
    let n = grid.n;
    let zero = State::zeros(model.n);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    Stepper { cfg, name: "method-of-lines" }.run(grid, dt, n_steps, init, |_, old, new, incr| {
        let b1 = rhs(old, &mut k1);
        for k in 0..n {
            tmp[k] = old[k].axpy(dt * half, &k1[k]);
        }
        let b2 = rhs(&tmp, &mut k2);
        for k in 0..n {
            tmp[k] = old[k].axpy(dt * half, &k2[k]);
        }
        let b3 = rhs(&tmp, &mut k3);
        for k in 0..n {
            tmp[k] = old[k].axpy(dt, &k3[k]);
        }
        let b4 = rhs(&tmp, &mut k4);
        for k in 0..n {
            new[k] = old[k] + (k1[k] + (k2[k] + k3[k]) * T::lit(2.0) + k4[k]) * (dt * sixth);
        }
        *incr = (b1 + (b2 + b3) * T::lit(2.0) + b4) * (dt * sixth);
        Ok(())
    })
}
