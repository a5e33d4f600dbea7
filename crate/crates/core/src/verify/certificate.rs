use serde::{Deserialize, Serialize};

use super::space_time::SpaceTime;
use super::weak::{entropy_residual, weak_residual, FamilyDescriptor, StripResidual, TestFamily, Window};
use crate::error::Result;
use crate::models::FluxModel;
use crate::schemes::PiecewiseConstantFn;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CertifyOptions {
    pub family: TestFamily,
    /// Number of equal strips the time range is cut into.
    pub strips: usize,
    /// Number of sampled times for the Lipschitz check (all pairs are used).
    pub lipschitz_samples: usize,
    /// Check the entropy inequality when the model has an entropy pair.
    pub entropy: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { family: TestFamily::default(), strips: 4, lipschitz_samples: 33, entropy: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsCertificate {
    pub modulus: f64,
    /// `‖u(0) − ū‖_{L¹}` over the window, when the initial data is given.
    pub initial_excess: Option<f64>,
    pub lipschitz_excess: f64,
    pub weak_excess: f64,
    pub entropy_excess: Option<f64>,
    pub combined: f64,
    pub family: FamilyDescriptor,
    pub weak: Vec<StripResidual>,
    pub entropy: Vec<StripResidual>,
}

/// Smallest `ε` for which `u` passes every check of an ε-approximate
/// solution against the finite test family, on `x ∈ [x0, x1]`.
pub fn certify_eps_approx<T: Scalar, S: SpaceTime<T> + ?Sized>(
    model: &FluxModel<T>,
    sol: &S,
    initial: Option<&PiecewiseConstantFn<T>>,
    modulus: f64,
    x_range: (f64, f64),
    opts: &CertifyOptions,
) -> Result<EpsCertificate> {
    let (t0, t1) = sol.time_range();
    let (lo, hi) = (T::lit(x_range.0), T::lit(x_range.1));
    let initial_excess = initial.map(|u0| sol.profile(t0).l1_distance(u0, lo, hi).to_f64_lossy());

    let times = sol.sample_times(opts.lipschitz_samples);
    let profiles: Vec<PiecewiseConstantFn<T>> = times.iter().map(|&t| sol.profile(t)).collect();
    let mut lipschitz_excess = 0.0f64;
    for i in 0..profiles.len() {
        for j in i + 1..profiles.len() {
            let d = profiles[i].l1_distance(&profiles[j], lo, hi).to_f64_lossy();
            let dt = (times[j] - times[i]).to_f64_lossy().abs();
            lipschitz_excess = lipschitz_excess.max(d - modulus * dt);
        }
    }

    let edges = strip_edges(sol, opts.strips.max(1));
    let mut weak = Vec::new();
    let mut entropy = Vec::new();
    let want_entropy = opts.entropy && model.entropy.is_some();
    for w in edges.windows(2) {
        let win = Window::new((w[0].to_f64_lossy(), w[1].to_f64_lossy()), x_range);
        weak.push(weak_residual(model, sol, &win, &opts.family)?);
        if want_entropy {
            entropy.push(entropy_residual(model, sol, &win, &opts.family)?);
        }
    }
    let weak_excess = weak.iter().map(StripResidual::eps_required).fold(0.0, f64::max);
    let entropy_excess = want_entropy.then(|| entropy.iter().map(StripResidual::eps_required).fold(0.0, f64::max));
    let combined = [initial_excess.unwrap_or(0.0), lipschitz_excess, weak_excess, entropy_excess.unwrap_or(0.0)]
        .into_iter()
        .fold(0.0, f64::max);
    let win = Window::new((t0.to_f64_lossy(), t1.to_f64_lossy()), x_range);
    let mut family = opts.family.describe(&win, 0);
    family.tests = weak.iter().map(|s| s.tests.len()).sum();
    Ok(EpsCertificate {
        modulus,
        initial_excess,
        lipschitz_excess,
        weak_excess,
        entropy_excess,
        combined,
        family,
        weak,
        entropy,
    })
}

/// Equal strips, with edges moved to the nearest stored level when the
/// solution only changes at stored levels.
fn strip_edges<T: Scalar, S: SpaceTime<T> + ?Sized>(sol: &S, n: usize) -> Vec<T> {
    let (t0, t1) = sol.time_range();
    let raw: Vec<T> = (0..=n).map(|k| t0 + (t1 - t0) * T::from_usize_lossy(k) / T::from_usize_lossy(n)).collect();
    if !sol.piecewise_constant_in_time() {
        return raw;
    }
    let mut levels = vec![t0];
    levels.extend(sol.time_breaks(t0, t1));
    levels.push(t1);
    let mut out: Vec<T> = raw
        .iter()
        .map(|&t| {
            *levels
                .iter()
                .min_by(|a, b| (**a - t).abs().partial_cmp(&(**b - t).abs()).unwrap())
                .unwrap()
        })
        .collect();
    out.dedup();
    out
}
