//! Implicit upwind (backward Euler) steps for models with speeds in `[1, 2]`.

use super::grid::{fit_steps, Grid, Stepper};
use super::speeds::check_speed_range;
use super::{Boundary, GridSolution, InitialData, SchemeConfig};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::models::FluxModel;
use crate::scalar::Scalar;

const MAX_NEWTON: usize = 50;

/// One level solves `w_k = v_k − (ε/Δx)(f(w_k) − f(w_{k−1}))` cell by cell
/// from the left, with `w_{−1} = v_0`. The time step is `ε` (the last step is
/// shortened to hit `t_final`); `Δx = cfg.dx`, default `ε/10`.
pub fn backward_euler_run<T: Scalar>(model: &FluxModel<T>, data: &InitialData<T>, cfg: &SchemeConfig) -> Result<GridSolution<T>> {
    cfg.validate()?;
    if cfg.boundary == Boundary::Periodic {
        return Err(Error::InvalidInput("backward Euler marches from the left boundary; periodic data is not supported".into()));
    }
    let grid = Grid::<T>::new(cfg.domain, cfg.dx.unwrap_or(cfg.eps / 10.0))?;
    let init = data.cell_averages(grid.x0, grid.dx, grid.n)?;
    if init[0].dim() != model.n {
        return Err(Error::DimensionMismatch { expected: model.n, got: init[0].dim() });
    }
    check_speed_range(model, &init, T::one(), T::lit(2.0))?;
    let (n_steps, dt) = fit_steps(T::lit(cfg.t_final), T::lit(cfg.eps));
    let r = dt / grid.dx;
    let n_dim = model.n;
    let tiny = T::lit(1e-12);
    Stepper { cfg, name: "backward-euler" }.run(grid, dt, n_steps, init, |_, v, w, incr| {
        if n_dim > 1 {
            check_speed_range(model, v, T::one(), T::lit(2.0))?;
        }
        let mut f_prev = model.flux(&v[0]);
        let f_in = f_prev;
        let mut w_prev = v[0];
        for k in 0..v.len() {
            // start from the upwind value: exact for constant data
            let mut x = if k == 0 { v[0] } else { w_prev };
            let mut fx = model.flux(&x);
            let mut ok = false;
            let mut res = T::infinity();
            for _ in 0..MAX_NEWTON {
                let g = x - v[k] + (fx - f_prev) * r;
                let scale = T::one() + v[k].norm_inf() + r * (fx.norm_inf() + f_prev.norm_inf());
                res = g.norm_inf() / scale;
                if res <= tiny {
                    ok = true;
                    break;
                }
                let jac = Mat::identity(n_dim).add(&model.jacobian(&x).scale(r));
                let Some(dx) = jac.solve(&g) else { break };
                x -= dx;
                fx = model.flux(&x);
            }
            if !ok {
                return Err(Error::NewtonFailure { cell: k, residual: res.to_f64_lossy() });
            }
            w[k] = x;
            w_prev = x;
            f_prev = fx;
        }
        *incr = (f_in - f_prev) * dt;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::advection;
    use crate::linalg::State;
    use crate::schemes::PiecewiseConstantFn;

    #[test]
    fn constant_is_fixed() {
        let m = advection::<f64>(1.5);
        let data: InitialData<f64> = PiecewiseConstantFn::constant(State::scalar(0.7)).into();
        let cfg = SchemeConfig { eps: 0.1, t_final: 0.3, ..Default::default() };
        let sol = backward_euler_run(&m, &data, &cfg).unwrap();
        assert!(sol.last().cells.iter().all(|u| u[0] == 0.7));
    }

    #[test]
    fn slow_speeds_rejected() {
        let m = advection::<f64>(0.5);
        let data: InitialData<f64> = PiecewiseConstantFn::constant(State::scalar(0.7)).into();
        let r = backward_euler_run(&m, &data, &SchemeConfig::default());
        assert!(matches!(r, Err(Error::SpeedRangeViolation { .. })));
    }
}
