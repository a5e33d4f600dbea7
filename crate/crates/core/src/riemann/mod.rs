//! Wave curves, exact Riemann solvers and shock admissibility.

mod admissibility;
mod curves;
mod scalar;
mod solver;

use serde::{Deserialize, Serialize};

pub use admissibility::{
    entropy_admissible_shock, entropy_margin, liu_admissible, liu_margin_scalar, rh_residual,
    AdmissibilityVerdict,
};
pub use curves::{rarefaction_curve, shock_curve, CurvePoint, ShockCurve};
pub use scalar::{solve_riemann_scalar, solve_riemann_scalar_with};
pub use solver::{small_data_radius, solve_riemann, solve_riemann_with};

pub(crate) use curves::{integral_curve, ShockBranch};
pub(crate) use solver::{classify_local, newton_on, FieldKind};

use crate::linalg::State;
use crate::scalar::Scalar;

/// How large Riemann data may be before the system solver refuses it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusPolicy {
    /// `factor · (min eigenvalue gap) / (max ‖D²f‖)` evaluated around the data.
    Auto { factor: f64 },
    Fixed(f64),
    Unlimited,
}

impl Default for RadiusPolicy {
    fn default() -> Self {
        RadiusPolicy::Auto { factor: 0.25 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannOptions {
    pub radius: RadiusPolicy,
    /// RK4 steps used for every rarefaction or contact curve.
    pub rarefaction_steps: usize,
    /// Maximal continuation step along shock curves.
    pub shock_step: f64,
    pub max_newton: usize,
    /// Points of the refinement grid of the scalar envelope construction.
    pub n_env: usize,
    /// Samples of `λ(s)` used for Liu margins.
    pub liu_samples: usize,
}

impl Default for RiemannOptions {
    fn default() -> Self {
        Self {
            radius: RadiusPolicy::default(),
            rarefaction_steps: 64,
            shock_step: 0.05,
            max_newton: 60,
            n_env: 4096,
            liu_samples: 256,
        }
    }
}

/// One elementary wave of a Riemann fan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub enum Wave<T> {
    Shock { family: usize, u_l: State<T>, u_r: State<T>, speed: T, liu_margin: T },
    Rarefaction {
        family: usize,
        u_l: State<T>,
        u_r: State<T>,
        speed_l: T,
        speed_r: T,
        /// `(λ, u)` pairs with `λ` strictly increasing.
        profile: Vec<(T, State<T>)>,
    },
    Contact { family: usize, u_l: State<T>, u_r: State<T>, speed: T },
    NonPhysical { u_l: State<T>, u_r: State<T>, speed: T, strength: T },
}

impl<T: Scalar> Wave<T> {
    pub fn u_l(&self) -> &State<T> {
        match self {
            Wave::Shock { u_l, .. }
            | Wave::Rarefaction { u_l, .. }
            | Wave::Contact { u_l, .. }
            | Wave::NonPhysical { u_l, .. } => u_l,
        }
    }

    pub fn u_r(&self) -> &State<T> {
        match self {
            Wave::Shock { u_r, .. }
            | Wave::Rarefaction { u_r, .. }
            | Wave::Contact { u_r, .. }
            | Wave::NonPhysical { u_r, .. } => u_r,
        }
    }

    pub fn speed_l(&self) -> T {
        match self {
            Wave::Shock { speed, .. } | Wave::Contact { speed, .. } | Wave::NonPhysical { speed, .. } => *speed,
            Wave::Rarefaction { speed_l, .. } => *speed_l,
        }
    }

    pub fn speed_r(&self) -> T {
        match self {
            Wave::Shock { speed, .. } | Wave::Contact { speed, .. } | Wave::NonPhysical { speed, .. } => *speed,
            Wave::Rarefaction { speed_r, .. } => *speed_r,
        }
    }

    pub fn family(&self) -> Option<usize> {
        match self {
            Wave::Shock { family, .. } | Wave::Rarefaction { family, .. } | Wave::Contact { family, .. } => {
                Some(*family)
            }
            Wave::NonPhysical { .. } => None,
        }
    }

    /// Shocks, contacts and non-physical waves are discontinuities.
    pub fn is_jump(&self) -> bool {
        !matches!(self, Wave::Rarefaction { .. })
    }

    fn eval_inside(&self, xi: T) -> State<T> {
        let Wave::Rarefaction { profile, u_l, u_r, .. } = self else {
            return *self.u_r();
        };
        if profile.is_empty() {
            return *u_r;
        }
        if xi <= profile[0].0 {
            return profile[0].1;
        }
        // first node with λ ≥ ξ
        let k = profile.partition_point(|(l, _)| *l < xi);
        if k >= profile.len() {
            return profile.last().map(|p| p.1).unwrap_or(*u_l);
        }
        let (l0, s0) = profile[k - 1];
        let (l1, s1) = profile[k];
        let w = if l1 > l0 { (xi - l0) / (l1 - l0) } else { T::one() };
        s0 + (s1 - s0) * w
    }
}

/// Self-similar solution `U(x/t)` of a Riemann problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct WaveFan<T> {
    pub u_minus: State<T>,
    pub u_plus: State<T>,
    /// Intermediate constant states `ω₀ = u⁻, …, ω_n = u⁺` (for scalar fans `[u⁻, u⁺]`).
    pub omega: Vec<State<T>>,
    pub waves: Vec<Wave<T>>,
}

impl<T: Scalar> WaveFan<T> {
    pub fn trivial(u: State<T>) -> Self {
        Self { u_minus: u, u_plus: u, omega: vec![u, u], waves: Vec::new() }
    }

    /// Largest violation of the left-to-right speed ordering (0 when ordered).
    pub fn order_defect(&self) -> T {
        let mut worst = T::zero();
        for w in &self.waves {
            worst = worst.max(w.speed_l() - w.speed_r());
        }
        for p in self.waves.windows(2) {
            worst = worst.max(p[0].speed_r() - p[1].speed_l());
        }
        worst
    }

    pub fn min_speed(&self) -> Option<T> {
        self.waves.first().map(|w| w.speed_l())
    }

    pub fn max_speed(&self) -> Option<T> {
        self.waves.last().map(|w| w.speed_r())
    }

    pub fn evaluate(&self, xi: T) -> State<T> {
        evaluate_fan(self, xi)
    }
}

/// Value of the fan at `ξ = x/t`. At a discontinuity travelling with speed
/// `ξ` the left state is returned.
pub fn evaluate_fan<T: Scalar>(fan: &WaveFan<T>, xi: T) -> State<T> {
    for w in &fan.waves {
        if xi <= w.speed_l() {
            return *w.u_l();
        }
        if let Wave::Rarefaction { speed_r, .. } = w {
            if xi < *speed_r {
                return w.eval_inside(xi);
            }
        }
    }
    fan.u_plus
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fan_evaluation_conventions() {
        let s = |x: f64| State::scalar(x);
        let fan = WaveFan {
            u_minus: s(1.0),
            u_plus: s(0.0),
            omega: vec![s(1.0), s(0.0)],
            waves: vec![Wave::Shock { family: 0, u_l: s(1.0), u_r: s(0.0), speed: 0.5, liu_margin: 0.0 }],
        };
        assert_eq!(evaluate_fan(&fan, 0.5 - 1e-9)[0], 1.0);
        assert_eq!(evaluate_fan(&fan, 0.5)[0], 1.0);
        assert_eq!(evaluate_fan(&fan, 0.5 + 1e-9)[0], 0.0);
        assert_eq!(fan.order_defect(), 0.0);
    }
}
