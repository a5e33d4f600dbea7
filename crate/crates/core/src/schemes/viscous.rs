//! Explicit viscous approximations `u_t + f(u)_x = ε (B(u) u_x)_x` with a
//! local Lax–Friedrichs (Rusanov) convective flux.

use super::grid::{fit_steps, ghosts, Grid, Stepper};
use super::speeds::{local_speed, speed_bound};
use super::{DiffusionSelector, GridSolution, InitialData, SchemeConfig};
use crate::error::{Error, Result};
use crate::linalg::{Mat, State};
use crate::models::FluxModel;
use crate::scalar::Scalar;

enum Diffusion<'m, T> {
    None,
    Identity,
    Matrix(Box<dyn Fn(&State<T>) -> Mat<T> + 'm>),
}

/// `ε u_xx` with `Δx = cfg.dx` (default `ε/8`, at most `ε/4`).
pub fn viscous_run<T: Scalar>(model: &FluxModel<T>, data: &InitialData<T>, cfg: &SchemeConfig) -> Result<GridSolution<T>> {
    run(model, data, cfg, Diffusion::Identity, "viscous")
}

/// `ε (B(u) u_x)_x` with the face average `½(B_k + B_{k+1})`.
pub fn nonlinear_diffusion_run<T: Scalar>(model: &FluxModel<T>, data: &InitialData<T>, cfg: &SchemeConfig) -> Result<GridSolution<T>> {
    let d = match &cfg.diffusion {
        DiffusionSelector::Identity => Diffusion::Identity,
        DiffusionSelector::Zero => Diffusion::None,
        DiffusionSelector::Model => Diffusion::Matrix(Box::new(|u: &State<T>| model.diffusion(u))),
        DiffusionSelector::Diagonal(d) => {
            if d.len() != model.n {
                return Err(Error::DimensionMismatch { expected: model.n, got: d.len() });
            }
            if d.iter().any(|&x| !(x >= 0.0)) {
                return Err(Error::InvalidInput("diffusion diagonal must be nonnegative".into()));
            }
            let m = Mat::diag(&d.iter().map(|&x| T::lit(x)).collect::<Vec<_>>());
            Diffusion::Matrix(Box::new(move |_: &State<T>| m))
        }
    };
    run(model, data, cfg, d, "nonlinear-diffusion")
}

/// Conservative Rusanov scheme without diffusion, `Δx = cfg.dx` (default `ε`),
/// `Δt = Δx/(2M)`.
pub fn lax_friedrichs_run<T: Scalar>(model: &FluxModel<T>, data: &InitialData<T>, cfg: &SchemeConfig) -> Result<GridSolution<T>> {
    let cfg = SchemeConfig { dx: Some(cfg.dx.unwrap_or(cfg.eps)), ..cfg.clone() };
    run(model, data, &cfg, Diffusion::None, "lax-friedrichs")
}

fn run<T: Scalar>(
    model: &FluxModel<T>,
    data: &InitialData<T>,
    cfg: &SchemeConfig,
    diff: Diffusion<'_, T>,
    name: &'static str,
) -> Result<GridSolution<T>> {
    cfg.validate()?;
    let eps = T::lit(cfg.eps);
    let dx_f = cfg.dx.unwrap_or(cfg.eps / 8.0);
    let viscous = !matches!(diff, Diffusion::None);
    if viscous && dx_f > cfg.eps / 4.0 * (1.0 + 1e-12) {
        return Err(Error::CflViolation(format!("dx = {dx_f} does not resolve the viscous layer (need dx <= eps/4)")));
    }
    let grid = Grid::<T>::new(cfg.domain, dx_f)?;
    let init = data.cell_averages(grid.x0, grid.dx, grid.n)?;
    if init[0].dim() != model.n {
        return Err(Error::DimensionMismatch { expected: model.n, got: init[0].dim() });
    }
    for u in &init {
        model.check_domain(u)?;
    }
    let dx = grid.dx;
    // systems may speed up during the run; leave headroom and recheck each step
    let m0 = speed_bound(model, &init)?;
    let m = if model.n == 1 { m0 } else { m0 * T::lit(1.25) };
    let m = m.max(T::lit(1e-12));
    let b_norm = match &diff {
        Diffusion::None => T::zero(),
        Diffusion::Identity => T::one(),
        Diffusion::Matrix(b) => {
            let mut s = T::zero();
            for u in &init {
                let bu = b(u);
                for i in 0..model.n {
                    s = s.max((0..model.n).map(|j| bu[(i, j)].abs()).fold(T::zero(), |a, x| a + x));
                }
            }
            s
        }
    };
    let mut dt_max = dx / (m + m);
    if b_norm > T::zero() {
        dt_max = dt_max.min(dx * dx / (T::lit(4.0) * eps * b_norm));
    }
    let dt_max = match cfg.dt {
        Some(d) if T::lit(d) > dt_max * (T::one() + T::lit(1e-12)) => {
            return Err(Error::CflViolation(format!("dt = {d} exceeds the stability bound {}", dt_max.to_f64_lossy())));
        }
        Some(d) => T::lit(d),
        None => dt_max,
    };
    let (n_steps, dt) = fit_steps(T::lit(cfg.t_final), dt_max);
    let lam = dt / dx;
    let nu = eps / dx;
    let half = T::lit(0.5);
    let n = grid.n;
    let mut f = vec![State::zeros(model.n); n + 2];
    let mut a = vec![T::zero(); n + 2];
    let mut bm: Vec<Mat<T>> = Vec::new();
    let mut ext = vec![State::zeros(model.n); n + 2];
    let boundary = cfg.boundary;
    Stepper { cfg, name }.run(grid, dt, n_steps, init, |_, old, new, incr| {
        let (gl, gr) = ghosts(old, boundary);
        ext[0] = gl;
        ext[1..=n].copy_from_slice(old);
        ext[n + 1] = gr;
        for k in 0..n + 2 {
            f[k] = model.flux(&ext[k]);
            a[k] = local_speed(model, &ext[k])?;
            if a[k] > m * (T::one() + T::lit(1e-9)) {
                return Err(Error::CflViolation(format!(
                    "characteristic speed {} exceeds the step bound {}",
                    a[k].to_f64_lossy(),
                    m.to_f64_lossy()
                )));
            }
        }
        if let Diffusion::Matrix(b) = &diff {
            bm.clear();
            bm.extend(ext.iter().map(|u| b(u)));
        }
        let face = |k: usize| -> State<T> {
            // flux through the face between ext[k] and ext[k+1]
            let (ul, ur) = (&ext[k], &ext[k + 1]);
            let alpha = a[k].max(a[k + 1]);
            let du = *ur - *ul;
            let mut g = (f[k] + f[k + 1]) * half - du * (alpha * half);
            match &diff {
                Diffusion::None => {}
                Diffusion::Identity => g -= du * nu,
                Diffusion::Matrix(_) => {
                    let bf = bm[k].add(&bm[k + 1]).scale(half);
                    g -= bf.mul_vec(&du) * nu;
                }
            }
            g
        };
        let mut g_left = face(0);
        let g_in = g_left;
        for k in 0..n {
            let g_right = face(k + 1);
            new[k] = old[k] - (g_right - g_left) * lam;
            g_left = g_right;
        }
        *incr = (g_in - g_left) * dt;
        Ok(())
    })
}
