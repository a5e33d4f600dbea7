use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::PiecewiseConstantFn;
use crate::error::{Error, Result};
use crate::linalg::State;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    ConstantExtension,
    Periodic,
}

/// Sampling sequence for the Glimm restart points.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum ThetaSequence {
    /// Decimal digits of `j` reversed behind the radix point.
    #[default]
    ReversedDigit,
    /// Radical inverse of `j` in base 2.
    VanDerCorput,
    Constant(f64),
}

/// Which diffusion matrix a nonlinear-diffusion run uses.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum DiffusionSelector {
    #[default]
    Identity,
    Zero,
    /// The model's own `B(u)`.
    Model,
    Diagonal(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MollifierKernel {
    /// `(1 − r²)³` on `|r| < 1`.
    #[default]
    Polynomial,
    /// `exp(−1/(1 − r²))` on `|r| < 1`.
    Exponential,
}

/// Run parameters shared by all schemes. Fields a scheme does not use are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeConfig {
    /// Grid size (Godunov, Glimm, method of lines), viscosity (viscous,
    /// nonlinear diffusion), relaxation time (Jin–Xin) or time step
    /// (backward Euler, mollification).
    pub eps: f64,
    pub t_final: f64,
    pub domain: (f64, f64),
    pub boundary: Boundary,
    /// Cell size for schemes where it is independent of `eps`.
    pub dx: Option<f64>,
    /// Explicit time step override; checked against the stability bound.
    pub dt: Option<f64>,
    /// Front-tracking accuracy: maximal rarefaction front strength.
    pub delta: f64,
    /// Front-tracking threshold below which outgoing waves become non-physical.
    pub rho_np: f64,
    pub front_cap: usize,
    pub sequence: ThetaSequence,
    pub mollifier_width: Option<f64>,
    pub kernel: MollifierKernel,
    pub diffusion: DiffusionSelector,
    /// Relaxation speed squared for Jin–Xin; defaults to `max(1, max λ²)`.
    pub a2: Option<f64>,
    /// At most this many snapshots are kept (evenly strided, plus the last level).
    pub max_snapshots: usize,
    /// Additional levels to store, by time.
    pub output_times: Vec<f64>,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            eps: 0.01,
            t_final: 1.0,
            domain: (-1.0, 2.0),
            boundary: Boundary::ConstantExtension,
            dx: None,
            dt: None,
            delta: 0.05,
            rho_np: 1e-3,
            front_cap: 100_000,
            sequence: ThetaSequence::ReversedDigit,
            mollifier_width: None,
            kernel: MollifierKernel::Polynomial,
            diffusion: DiffusionSelector::Identity,
            a2: None,
            max_snapshots: 201,
            output_times: Vec::new(),
        }
    }
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return bad("eps must be positive");
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return bad("t_final must be nonnegative");
        }
        if !(self.domain.1 > self.domain.0) || !self.domain.0.is_finite() || !self.domain.1.is_finite() {
            return bad("domain must be a finite nonempty interval");
        }
        if let Some(dx) = self.dx {
            if !(dx > 0.0) {
                return bad("dx must be positive");
            }
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return bad("dt must be positive");
            }
        }
        if !(self.delta > 0.0) || !(self.rho_np >= 0.0) {
            return bad("delta must be positive and rho_np nonnegative");
        }
        if self.max_snapshots < 2 {
            return bad("max_snapshots must be at least 2");
        }
        Ok(())
    }
}

/// Initial data for grid schemes.
#[derive(Clone)]
pub enum InitialData<T> {
    Pc(PiecewiseConstantFn<T>),
    /// Cell averages, one per cell of the configured grid.
    Cells(Vec<State<T>>),
    /// A function of `x`, averaged over each cell by Gauss quadrature.
    Profile(Arc<dyn Fn(T) -> State<T> + Send + Sync>),
}

impl<T: Scalar> std::fmt::Debug for InitialData<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialData::Pc(p) => f.debug_tuple("Pc").field(p).finish(),
            InitialData::Cells(c) => write!(f, "Cells({} values)", c.len()),
            InitialData::Profile(_) => f.write_str("Profile(..)"),
        }
    }
}

impl<T: Scalar> From<PiecewiseConstantFn<T>> for InitialData<T> {
    fn from(p: PiecewiseConstantFn<T>) -> Self {
        InitialData::Pc(p)
    }
}

impl<T: Scalar> InitialData<T> {
    pub fn profile(f: impl Fn(T) -> State<T> + Send + Sync + 'static) -> Self {
        InitialData::Profile(Arc::new(f))
    }

    pub fn cell_averages(&self, x0: T, dx: T, n: usize) -> Result<Vec<State<T>>> {
        match self {
            InitialData::Pc(p) => Ok(p.cell_averages(x0, dx, n)),
            InitialData::Cells(c) => {
                if c.len() != n {
                    return Err(Error::InvalidInput(format!("expected {n} cell values, got {}", c.len())));
                }
                Ok(c.clone())
            }
            InitialData::Profile(f) => {
                let (nodes, weights) = gauss5::<T>();
                Ok((0..n)
                    .map(|k| {
                        let a = x0 + dx * T::from_usize_lossy(k);
                        let c = a + dx * T::lit(0.5);
                        let mut acc = State::zeros(f(c).dim());
                        for (z, w) in nodes.iter().zip(weights.iter()) {
                            acc = acc.axpy(*w * T::lit(0.5), &f(c + *z * dx * T::lit(0.5)));
                        }
                        acc
                    })
                    .collect())
            }
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            InitialData::Pc(p) => Some(p.dim()),
            InitialData::Cells(c) => c.first().map(|u| u.dim()),
            InitialData::Profile(f) => Some(f(T::zero()).dim()),
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub(crate) fn gauss5<T: Scalar>() -> ([T; 5], [T; 5]) {
    let a = 0.906_179_845_938_664_f64;
    let b = 0.538_469_310_105_683_1_f64;
    let wa = 0.236_926_885_056_189_1_f64;
    let wb = 0.478_628_670_499_366_5_f64;
    let w0 = 128.0 / 225.0;
    (
        [T::lit(-a), T::lit(-b), T::zero(), T::lit(b), T::lit(a)],
        [T::lit(wa), T::lit(wb), T::lit(w0), T::lit(wb), T::lit(wa)],
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct Snapshot<T> {
    pub step: usize,
    pub t: T,
    pub cells: Vec<State<T>>,
}

/// Bookkeeping recorded at every time level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct StepRecord<T> {
    pub t: T,
    /// `Σ u_k Δx`.
    pub mass: State<T>,
    /// Cumulative `∫ (F_left − F_right) dt` through the domain ends.
    pub inflow: State<T>,
    /// Discrete total variation `Σ |u_{k+1} − u_k|`.
    pub tv: T,
}

/// Cell averages on a uniform grid at a sequence of time levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct GridSolution<T> {
    pub scheme: String,
    pub t0: T,
    pub dt: T,
    pub dx: T,
    /// Left edge of cell 0.
    pub x0: T,
    pub n_cells: usize,
    pub boundary: Boundary,
    pub snapshots: Vec<Snapshot<T>>,
    pub history: Vec<StepRecord<T>>,
    /// Glimm sampling values `θ_1, θ_2, …`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub thetas: Vec<f64>,
}

impl<T: Scalar> GridSolution<T> {
    pub fn x_center(&self, k: usize) -> T {
        self.x0 + self.dx * (T::from_usize_lossy(k) + T::lit(0.5))
    }

    pub fn x_end(&self) -> T {
        self.x0 + self.dx * T::from_usize_lossy(self.n_cells)
    }

    pub fn last(&self) -> &Snapshot<T> {
        self.snapshots.last().expect("grid solution has snapshots")
    }

    pub fn first(&self) -> &Snapshot<T> {
        &self.snapshots[0]
    }

    /// Stored snapshot whose time is closest to `t`.
    pub fn nearest(&self, t: T) -> &Snapshot<T> {
        self.snapshots
            .iter()
            .min_by(|a, b| (a.t - t).abs().partial_cmp(&(b.t - t).abs()).unwrap())
            .expect("grid solution has snapshots")
    }

    pub fn to_pc(&self, snap: &Snapshot<T>) -> PiecewiseConstantFn<T> {
        PiecewiseConstantFn::from_cells(self.x0, self.dx, &snap.cells).expect("nonempty grid")
    }

    /// `max_j |mass_j − mass_0 − inflow_j| / max(t_j − t_0, 1)`.
    pub fn mass_drift_rate(&self) -> T {
        let Some(h0) = self.history.first() else { return T::zero() };
        self.history
            .iter()
            .map(|h| {
                let d = (h.mass - h0.mass - h.inflow).norm_inf();
                d / (h.t - h0.t).max(T::one())
            })
            .fold(T::zero(), T::max)
    }

    /// Largest increase of discrete TV between consecutive levels.
    pub fn max_tv_increase(&self) -> T {
        self.history.windows(2).map(|w| w[1].tv - w[0].tv).fold(T::neg_infinity(), T::max)
    }
}

pub(crate) fn discrete_tv<T: Scalar>(cells: &[State<T>]) -> T {
    cells.windows(2).map(|w| (w[1] - w[0]).norm()).fold(T::zero(), |a, b| a + b)
}

pub(crate) fn mass<T: Scalar>(cells: &[State<T>], dx: T) -> State<T> {
    let mut m = State::zeros(cells[0].dim());
    for c in cells {
        m += *c;
    }
    m * dx
}

/// Resolved uniform grid.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Grid<T> {
    pub x0: T,
    pub dx: T,
    pub n: usize,
}

impl<T: Scalar> Grid<T> {
    pub fn new(domain: (f64, f64), dx: f64) -> Result<Self> {
        let len = domain.1 - domain.0;
        let n = (len / dx).round();
        if !(n >= 2.0) || n > 5.0e7 {
            return Err(Error::InvalidInput(format!("grid of {n} cells on {domain:?} with dx = {dx}")));
        }
        Ok(Self { x0: T::lit(domain.0), dx: T::lit(dx), n: n as usize })
    }
}

/// Drives a one-level update `step(level, old, new, inflow_increment)` and
/// stores snapshots and per-level history.
pub(crate) struct Stepper<'c> {
    pub cfg: &'c SchemeConfig,
    pub name: &'static str,
}

impl<'c> Stepper<'c> {
    pub fn run<T: Scalar>(
        &self,
        grid: Grid<T>,
        dt: T,
        n_steps: usize,
        init: Vec<State<T>>,
        mut step: impl FnMut(usize, &[State<T>], &mut Vec<State<T>>, &mut State<T>) -> Result<()>,
    ) -> Result<GridSolution<T>> {
        let n_dim = init[0].dim();
        let stride = n_steps.div_ceil(self.cfg.max_snapshots - 1).max(1);
        let wanted: Vec<usize> = self
            .cfg
            .output_times
            .iter()
            .map(|&t| (T::lit(t) / dt).round().to_usize().unwrap_or(0).min(n_steps))
            .collect();
        let mut sol = GridSolution {
            scheme: self.name.to_string(),
            t0: T::zero(),
            dt,
            dx: grid.dx,
            x0: grid.x0,
            n_cells: grid.n,
            boundary: self.cfg.boundary,
            snapshots: Vec::new(),
            history: Vec::with_capacity(n_steps + 1),
            thetas: Vec::new(),
        };
        let mut cur = init;
        check_finite(&cur, 0)?;
        let mut inflow = State::zeros(n_dim);
        sol.history.push(StepRecord { t: T::zero(), mass: mass(&cur, grid.dx), inflow, tv: discrete_tv(&cur) });
        sol.snapshots.push(Snapshot { step: 0, t: T::zero(), cells: cur.clone() });
        let mut next = cur.clone();
        for j in 1..=n_steps {
            let mut incr = State::zeros(n_dim);
            step(j, &cur, &mut next, &mut incr)?;
            let (m, tv) = level_stats(&next, j)?;
            std::mem::swap(&mut cur, &mut next);
            inflow += incr;
            let t = dt * T::from_usize_lossy(j);
            sol.history.push(StepRecord { t, mass: m * grid.dx, inflow, tv });
            if j % stride == 0 || j == n_steps || wanted.contains(&j) {
                sol.snapshots.push(Snapshot { step: j, t, cells: cur.clone() });
            }
        }
        Ok(sol)
    }
}

/// Mass (without the `Δx` factor) and discrete TV in one pass, rejecting non-finite cells.
fn level_stats<T: Scalar>(cells: &[State<T>], step: usize) -> Result<(State<T>, T)> {
    let mut m = State::zeros(cells[0].dim());
    let mut tv = T::zero();
    let mut prev = cells[0];
    for (cell, c) in cells.iter().enumerate() {
        if !c.is_finite() {
            return Err(Error::NonfiniteState { step, cell });
        }
        m += *c;
        tv = tv + (*c - prev).norm();
        prev = *c;
    }
    Ok((m, tv))
}

fn check_finite<T: Scalar>(cells: &[State<T>], step: usize) -> Result<()> {
    match cells.iter().position(|c| !c.is_finite()) {
        Some(cell) => Err(Error::NonfiniteState { step, cell }),
        None => Ok(()),
    }
}

/// Ghost values for a one-cell stencil.
#[inline]
pub(crate) fn ghosts<T: Scalar>(cells: &[State<T>], b: Boundary) -> (State<T>, State<T>) {
    match b {
        Boundary::ConstantExtension => (cells[0], cells[cells.len() - 1]),
        Boundary::Periodic => (cells[cells.len() - 1], cells[0]),
    }
}

/// Number of levels and step for marching to `t_final` with steps ≤ `dt_max`.
pub(crate) fn fit_steps<T: Scalar>(t_final: T, dt_max: T) -> (usize, T) {
    if t_final <= T::zero() {
        return (0, dt_max);
    }
    let n = (t_final / dt_max * (T::one() - T::lit(1e-12))).ceil().to_usize().unwrap_or(1).max(1);
    (n, t_final / T::from_usize_lossy(n))
}

/// Number of levels of a fixed step `dt` closest to `t_final`.
pub(crate) fn fixed_steps<T: Scalar>(t_final: T, dt: T) -> usize {
    (t_final / dt).round().to_usize().unwrap_or(0)
}
