//! Upwind Godunov scheme for speed-normalized models (`Δt = Δx = ε`).

use super::grid::{fixed_steps, ghosts, Grid, Stepper};
use super::speeds::check_speed_range;
use super::{GridSolution, InitialData, SchemeConfig};
use crate::error::{Error, Result};
use crate::linalg::State;
use crate::models::FluxModel;
use crate::scalar::Scalar;

/// `u_{j+1,k} = u_{j,k} + f(u_{j,k−1}) − f(u_{j,k})` with `Δt = Δx = cfg.eps`.
pub fn godunov_run<T: Scalar>(model: &FluxModel<T>, data: &InitialData<T>, cfg: &SchemeConfig) -> Result<GridSolution<T>> {
    cfg.validate()?;
    let grid = Grid::<T>::new(cfg.domain, cfg.eps)?;
    let init = data.cell_averages(grid.x0, grid.dx, grid.n)?;
    if init[0].dim() != model.n {
        return Err(Error::DimensionMismatch { expected: model.n, got: init[0].dim() });
    }
    check_speed_range(model, &init, T::zero(), T::one())?;
    let dt = grid.dx;
    let n_steps = fixed_steps(T::lit(cfg.t_final), dt);
    let mut fl: Vec<State<T>> = Vec::with_capacity(grid.n);
    Stepper { cfg, name: "godunov" }.run(grid, dt, n_steps, init, |_, old, new, incr| {
        if model.n > 1 {
            check_speed_range(model, old, T::zero(), T::one())?;
        }
        fl.clear();
        fl.extend(old.iter().map(|u| model.flux(u)));
        let (gl, _) = ghosts(old, cfg.boundary);
        let f_gl = model.flux(&gl);
        for k in 0..old.len() {
            let f_left = if k == 0 { f_gl } else { fl[k - 1] };
            new[k] = old[k] + (f_left - fl[k]);
        }
        *incr = (f_gl - fl[old.len() - 1]) * dt;
        Ok(())
    })
}
