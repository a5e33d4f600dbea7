//! Glimm's random choice scheme with deterministic sampling sequences.

use super::speeds::check_speed_range;
use super::grid::{fixed_steps, ghosts, Grid, Stepper};
use super::{GridSolution, InitialData, SchemeConfig, ThetaSequence};
use crate::error::{Error, Result};
use crate::models::FluxModel;
use crate::riemann::{solve_riemann_with, RiemannOptions};
use crate::scalar::Scalar;

/// Decimal digits of `j` in reverse order behind the radix point:
/// `759 ↦ 0.957`.
pub fn reversed_digit_theta(j: u64) -> f64 {
    assert!(j >= 1, "sequence index starts at 1");
    let mut r: u64 = 0;
    let mut d: i32 = 0;
    let mut m = j;
    while m > 0 {
        r = r * 10 + m % 10;
        m /= 10;
        d += 1;
    }
    r as f64 / 10f64.powi(d)
}

/// Radical inverse of `j` in base 2.
pub fn van_der_corput(j: u64) -> f64 {
    let mut x = 0.0;
    let mut f = 0.5;
    let mut m = j;
    while m > 0 {
        if m & 1 == 1 {
            x += f;
        }
        f *= 0.5;
        m >>= 1;
    }
    x
}

impl ThetaSequence {
    pub fn theta(&self, j: u64) -> f64 {
        match *self {
            ThetaSequence::ReversedDigit => reversed_digit_theta(j),
            ThetaSequence::VanDerCorput => van_der_corput(j),
            ThetaSequence::Constant(c) => c,
        }
    }

    pub fn take(&self, n: usize) -> Vec<f64> {
        (1..=n as u64).map(|j| self.theta(j)).collect()
    }
}

/// `max_λ |#{j ≤ N : θ_j ∈ [0, λ]}/N − λ|` over the probes.
pub fn uniformity_defect(thetas: &[f64], probes: &[f64]) -> f64 {
    if thetas.is_empty() {
        return 0.0;
    }
    let n = thetas.len() as f64;
    probes
        .iter()
        .map(|&l| {
            let c = thetas.iter().filter(|&&t| (0.0..=l).contains(&t)).count() as f64;
            (c / n - l).abs()
        })
        .fold(0.0, f64::max)
}

/// At `t_{j}` the cell `[x_k, x_{k+1})` takes the value of the Riemann fan
/// issued from `x_k` at `ξ = θ_j` (`Δt = Δx = ε`, speeds in `[0, 1]`).
pub fn glimm_run<T: Scalar>(model: &FluxModel<T>, data: &InitialData<T>, cfg: &SchemeConfig) -> Result<GridSolution<T>> {
    cfg.validate()?;
    let grid = Grid::<T>::new(cfg.domain, cfg.eps)?;
    let init = data.cell_averages(grid.x0, grid.dx, grid.n)?;
    if init[0].dim() != model.n {
        return Err(Error::DimensionMismatch { expected: model.n, got: init[0].dim() });
    }
    check_speed_range(model, &init, T::zero(), T::one())?;
    let dt = grid.dx;
    let n_steps = fixed_steps(T::lit(cfg.t_final), dt);
    let opts = RiemannOptions { liu_samples: 2, ..Default::default() };
    let thetas = cfg.sequence.take(n_steps);
    let mut sol = Stepper { cfg, name: "glimm" }.run(grid, dt, n_steps, init, |j, old, new, incr| {
        if model.n > 1 {
            check_speed_range(model, old, T::zero(), T::one())?;
        }
        let theta = T::lit(thetas[j - 1]);
        let (gl, _) = ghosts(old, cfg.boundary);
        for k in 0..old.len() {
            let ul = if k == 0 { gl } else { old[k - 1] };
            let ur = old[k];
            new[k] = if ul == ur {
                ur
            } else {
                solve_riemann_with(model, &ul, &ur, &opts)
                    .map_err(|e| Error::RiemannFailure(e.to_string()))?
                    .evaluate(theta)
            };
        }
        *incr = (model.flux(&gl) - model.flux(&old[old.len() - 1])) * dt;
        Ok(())
    })?;
    sol.thetas = thetas;
    Ok(sol)
}
