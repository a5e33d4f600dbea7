use crate::linalg::State;
use crate::schemes::{FrontTrackingSolution, GridSolution, PiecewiseConstantFn};
use crate::scalar::Scalar;

/// A solution `u(t, ·)` that can be inspected at any time of its range.
pub trait SpaceTime<T: Scalar> {
    fn time_range(&self) -> (T, T);
    /// The profile at time `t` as a piecewise constant function of `x`.
    fn profile(&self, t: T) -> PiecewiseConstantFn<T>;
    /// Times in `[a, b]` where the solution changes its time dependence:
    /// stored levels for grids, interaction times for front tracking.
    fn time_breaks(&self, a: T, b: T) -> Vec<T>;
    /// Whether the solution is constant in time between consecutive breaks.
    fn piecewise_constant_in_time(&self) -> bool;
    /// Spatial resolution if the solution lives on a grid.
    fn resolution(&self) -> Option<T> {
        None
    }
    /// Times at which comparisons are cheap and meaningful.
    fn sample_times(&self, max: usize) -> Vec<T> {
        let (a, b) = self.time_range();
        let n = max.max(2);
        (0..n).map(|k| a + (b - a) * T::from_usize_lossy(k) / T::from_usize_lossy(n - 1)).collect()
    }
}

impl<T: Scalar> SpaceTime<T> for GridSolution<T> {
    fn time_range(&self) -> (T, T) {
        (self.first().t, self.last().t)
    }

    /// The latest stored level at or before `t`.
    fn profile(&self, t: T) -> PiecewiseConstantFn<T> {
        let k = self.snapshots.partition_point(|s| s.t <= t + self.dt * T::lit(1e-9));
        let snap = &self.snapshots[k.saturating_sub(1)];
        self.to_pc(snap)
    }

    fn time_breaks(&self, a: T, b: T) -> Vec<T> {
        self.snapshots.iter().map(|s| s.t).filter(|&t| t > a && t < b).collect()
    }

    fn piecewise_constant_in_time(&self) -> bool {
        true
    }

    fn resolution(&self) -> Option<T> {
        Some(self.dx)
    }

    fn sample_times(&self, max: usize) -> Vec<T> {
        let n = self.snapshots.len();
        let stride = n.div_ceil(max.max(2)).max(1);
        let mut v: Vec<T> = self.snapshots.iter().step_by(stride).map(|s| s.t).collect();
        if v.last() != Some(&self.last().t) {
            v.push(self.last().t);
        }
        v
    }
}

impl<T: Scalar> SpaceTime<T> for FrontTrackingSolution<T> {
    fn time_range(&self) -> (T, T) {
        (T::zero(), self.t_final)
    }

    fn profile(&self, t: T) -> PiecewiseConstantFn<T> {
        self.at(t)
    }

    fn time_breaks(&self, a: T, b: T) -> Vec<T> {
        let mut v: Vec<T> = self.event_times().into_iter().filter(|&t| t > a && t < b).collect();
        v.dedup();
        v
    }

    fn piecewise_constant_in_time(&self) -> bool {
        false
    }
}

/// A time-independent profile, handy as a reference or for testing.
#[derive(Debug, Clone)]
pub struct Stationary<T> {
    pub u: PiecewiseConstantFn<T>,
    pub t_final: T,
}

impl<T: Scalar> SpaceTime<T> for Stationary<T> {
    fn time_range(&self) -> (T, T) {
        (T::zero(), self.t_final)
    }
    fn profile(&self, _t: T) -> PiecewiseConstantFn<T> {
        self.u.clone()
    }
    fn time_breaks(&self, _a: T, _b: T) -> Vec<T> {
        Vec::new()
    }
    fn piecewise_constant_in_time(&self) -> bool {
        true
    }
}

/// A step `u⁻` / `u⁺` moving with constant speed from `x0`.
#[derive(Debug, Clone, Copy)]
pub struct TravelingStep<T> {
    pub x0: T,
    pub u_minus: State<T>,
    pub u_plus: State<T>,
    pub speed: T,
    pub t_final: T,
}

impl<T: Scalar> SpaceTime<T> for TravelingStep<T> {
    fn time_range(&self) -> (T, T) {
        (T::zero(), self.t_final)
    }
    fn profile(&self, t: T) -> PiecewiseConstantFn<T> {
        PiecewiseConstantFn::riemann(self.x0 + self.speed * t, self.u_minus, self.u_plus)
    }
    fn time_breaks(&self, _a: T, _b: T) -> Vec<T> {
        Vec::new()
    }
    fn piecewise_constant_in_time(&self) -> bool {
        false
    }
}

/// Classical solution of a scalar law with smooth data, by characteristics,
/// sampled at the centres of a uniform grid. Valid before the first gradient
/// catastrophe.
pub struct CharacteristicSolution<'m, T: Scalar> {
    model: &'m crate::models::FluxModel<T>,
    u0: Box<dyn Fn(T) -> T + 'm>,
    x0: T,
    dx: T,
    n: usize,
    t_final: T,
    speeds: (T, T),
}

impl<'m, T: Scalar> CharacteristicSolution<'m, T> {
    pub fn new(
        model: &'m crate::models::FluxModel<T>,
        u0: impl Fn(T) -> T + 'm,
        domain: (f64, f64),
        n_cells: usize,
        t_final: f64,
    ) -> Self {
        let (x0, x1) = (T::lit(domain.0), T::lit(domain.1));
        let dx = (x1 - x0) / T::from_usize_lossy(n_cells);
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for k in 0..=n_cells {
            let c = model.df1(u0(x0 + dx * T::from_usize_lossy(k)));
            lo = lo.min(c);
            hi = hi.max(c);
        }
        Self { model, u0: Box::new(u0), x0, dx, n: n_cells, t_final: T::lit(t_final), speeds: (lo, hi) }
    }

    /// `u(t, x) = u0(y)` with `y + t f′(u0(y)) = x`.
    pub fn value(&self, t: T, x: T) -> T {
        let (mut a, mut b) = (x - t * self.speeds.1, x - t * self.speeds.0);
        let g = |y: T| y + t * self.model.df1((self.u0)(y)) - x;
        for _ in 0..100 {
            let m = (a + b) * T::lit(0.5);
            if g(m) < T::zero() {
                a = m;
            } else {
                b = m;
            }
            if b - a <= T::epsilon() * (T::one() + x.abs()) {
                break;
            }
        }
        (self.u0)((a + b) * T::lit(0.5))
    }
}

impl<T: Scalar> SpaceTime<T> for CharacteristicSolution<'_, T> {
    fn time_range(&self) -> (T, T) {
        (T::zero(), self.t_final)
    }
    fn profile(&self, t: T) -> PiecewiseConstantFn<T> {
        let cells: Vec<State<T>> = (0..self.n)
            .map(|k| State::scalar(self.value(t, self.x0 + self.dx * (T::from_usize_lossy(k) + T::lit(0.5)))))
            .collect();
        PiecewiseConstantFn::from_cells(self.x0, self.dx, &cells).expect("nonempty grid")
    }
    fn time_breaks(&self, _a: T, _b: T) -> Vec<T> {
        Vec::new()
    }
    fn piecewise_constant_in_time(&self) -> bool {
        false
    }
    fn resolution(&self) -> Option<T> {
        Some(self.dx)
    }
}

/// Simple wave of one characteristic family: `u(t, x) = R(s(t, x))`, with `R`
/// the integral curve of `r_i` through `base` and `s` constant along
/// `ẋ = λ_i(R(s))`. Sampled at the centres of a uniform grid.
pub struct SimpleWaveSolution<'m, T: Scalar> {
    s0: Box<dyn Fn(T) -> T + 'm>,
    curve: Vec<(T, State<T>, T)>,
    x0: T,
    dx: T,
    n: usize,
    t_final: T,
    speeds: (T, T),
}

impl<'m, T: Scalar> SimpleWaveSolution<'m, T> {
    /// `s0` must take values in `[−s_max, s_max]`.
    pub fn new(
        model: &'m crate::models::FluxModel<T>,
        base: &State<T>,
        family: usize,
        s0: impl Fn(T) -> T + 'm,
        s_max: f64,
        domain: (f64, f64),
        n_cells: usize,
        t_final: f64,
    ) -> crate::error::Result<Self> {
        let steps = 4000;
        let s_max = T::lit(s_max);
        let back = crate::riemann::integral_curve(model, base, family, T::one(), -s_max, steps)?;
        let fwd = crate::riemann::integral_curve(model, base, family, T::one(), s_max, steps)?;
        let mut curve: Vec<(T, State<T>, T)> = back.iter().rev().map(|p| (p.s, p.state, p.speed)).collect();
        curve.extend(fwd.iter().skip(1).map(|p| (p.s, p.state, p.speed)));
        let (x0, x1) = (T::lit(domain.0), T::lit(domain.1));
        let dx = (x1 - x0) / T::from_usize_lossy(n_cells);
        let mut sol = Self { s0: Box::new(s0), curve, x0, dx, n: n_cells, t_final: T::lit(t_final), speeds: (T::zero(), T::zero()) };
        let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
        for k in 0..=n_cells {
            let c = sol.at_s((sol.s0)(x0 + dx * T::from_usize_lossy(k))).1;
            lo = lo.min(c);
            hi = hi.max(c);
        }
        sol.speeds = (lo, hi);
        Ok(sol)
    }

    fn at_s(&self, s: T) -> (State<T>, T) {
        let k = self.curve.partition_point(|p| p.0 < s).clamp(1, self.curve.len() - 1);
        let (a, b) = (&self.curve[k - 1], &self.curve[k]);
        let w = ((s - a.0) / (b.0 - a.0)).max(T::zero()).min(T::one());
        (a.1 + (b.1 - a.1) * w, a.2 + (b.2 - a.2) * w)
    }

    pub fn value(&self, t: T, x: T) -> State<T> {
        let (mut a, mut b) = (x - t * self.speeds.1, x - t * self.speeds.0);
        let g = |y: T| y + t * self.at_s((self.s0)(y)).1 - x;
        for _ in 0..100 {
            let m = (a + b) * T::lit(0.5);
            if g(m) < T::zero() {
                a = m;
            } else {
                b = m;
            }
            if b - a <= T::epsilon() * (T::one() + x.abs()) {
                break;
            }
        }
        self.at_s((self.s0)((a + b) * T::lit(0.5))).0
    }
}

impl<T: Scalar> SpaceTime<T> for SimpleWaveSolution<'_, T> {
    fn time_range(&self) -> (T, T) {
        (T::zero(), self.t_final)
    }
    fn profile(&self, t: T) -> PiecewiseConstantFn<T> {
        let cells: Vec<State<T>> =
            (0..self.n).map(|k| self.value(t, self.x0 + self.dx * (T::from_usize_lossy(k) + T::lit(0.5)))).collect();
        PiecewiseConstantFn::from_cells(self.x0, self.dx, &cells).expect("nonempty grid")
    }
    fn time_breaks(&self, _a: T, _b: T) -> Vec<T> {
        Vec::new()
    }
    fn piecewise_constant_in_time(&self) -> bool {
        false
    }
    fn resolution(&self) -> Option<T> {
        Some(self.dx)
    }
}
