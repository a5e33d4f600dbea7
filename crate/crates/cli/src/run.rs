use std::fmt::Write as _;
use std::time::Instant;

use hyperlab::models::FluxModel;
use hyperlab::riemann::WaveFan;
use hyperlab::schemes::*;
use hyperlab::verify::SpaceTime;
use hyperlab::State;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, SchemeId};
use crate::report::VerificationReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Solution {
    Grid(GridSolution<f64>),
    Fronts(FrontTrackingSolution<f64>),
}

impl Solution {
    pub fn as_space_time(&self) -> &dyn SpaceTime<f64> {
        match self {
            Solution::Grid(g) => g,
            Solution::Fronts(f) => f,
        }
    }

    pub fn scheme(&self) -> &str {
        match self {
            Solution::Grid(g) => &g.scheme,
            Solution::Fronts(_) => "front-tracking",
        }
    }

    pub fn t_final(&self) -> f64 {
        self.as_space_time().time_range().1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunBundle {
    pub version: String,
    pub config: ExperimentConfig,
    pub solution: Solution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<VerificationReport>,
    pub timing: Timing,
}

pub fn execute(model: &FluxModel<f64>, cfg: &ExperimentConfig) -> hyperlab::Result<(Solution, Timing)> {
    let start = Instant::now();
    let mut sc = cfg.scheme_config.clone();
    sc.output_times.extend(cfg.output.times.iter().copied());
    let sol = if cfg.scheme == SchemeId::FrontTracking {
        Solution::Fronts(front_tracking_run(model, &cfg.data.to_pc(sc.domain)?, &sc)?)
    } else {
        let data = cfg.data.initial_data();
        type Run = fn(&FluxModel<f64>, &InitialData<f64>, &SchemeConfig) -> hyperlab::Result<GridSolution<f64>>;
        let run: Run = match cfg.scheme {
            SchemeId::Godunov => godunov_run,
            SchemeId::Glimm => glimm_run,
            SchemeId::MethodOfLines => method_of_lines_run,
            SchemeId::Viscous => viscous_run,
            SchemeId::LaxFriedrichs => lax_friedrichs_run,
            SchemeId::NonlinearDiffusion => nonlinear_diffusion_run,
            SchemeId::JinXin => jin_xin_run,
            SchemeId::BackwardEuler => backward_euler_run,
            SchemeId::Mollification => mollification_run,
            SchemeId::FrontTracking => unreachable!(),
        };
        Solution::Grid(run(model, &data, &sc)?)
    };
    Ok((sol, Timing { wall_seconds: start.elapsed().as_secs_f64() }))
}

/// Rows `(t, cells)` for the CSV output: the stored levels nearest to the
/// requested times, or the initial and final levels.
pub fn output_levels(cfg: &ExperimentConfig, sol: &Solution) -> Vec<(f64, f64, f64, Vec<State<f64>>)> {
    let t_end = sol.t_final();
    let times: Vec<f64> = if cfg.output.times.is_empty() { vec![0.0, t_end] } else { cfg.output.times.clone() };
    match sol {
        Solution::Grid(g) => {
            let mut seen = Vec::new();
            let mut out = Vec::new();
            for t in times {
                let snap = g.nearest(t);
                if !seen.contains(&snap.step) {
                    seen.push(snap.step);
                    out.push((snap.t, g.x0, g.dx, snap.cells.clone()));
                }
            }
            out
        }
        Solution::Fronts(f) => {
            let (lo, hi) = cfg.scheme_config.domain;
            let dx = cfg.scheme_config.dx.unwrap_or((hi - lo) / 1000.0);
            let n = ((hi - lo) / dx).round().max(1.0) as usize;
            let dx = (hi - lo) / n as f64;
            times.into_iter().map(|t| (t, lo, dx, f.at(t.min(t_end)).cell_averages(lo, dx, n))).collect()
        }
    }
}

/// `t,x,u1[,u2...]` with 17 significant digits, cell centres as `x`.
pub fn snapshots_csv(n: usize, levels: &[(f64, f64, f64, Vec<State<f64>>)]) -> String {
    let mut out = String::from("t,x");
    for i in 1..=n {
        write!(out, ",u{i}").unwrap();
    }
    out.push('\n');
    for (t, x0, dx, cells) in levels {
        for (k, c) in cells.iter().enumerate() {
            write!(out, "{:.16e},{:.16e}", t, x0 + dx * (k as f64 + 0.5)).unwrap();
            for v in c.iter() {
                write!(out, ",{:.16e}", v).unwrap();
            }
            out.push('\n');
        }
    }
    out
}

/// `∫ |u(T, x) − U((x − x0)/T)| dx` on `domain`, by Gauss quadrature on
/// panels cut at every discontinuity of either function.
pub fn l1_to_fan(profile: &PiecewiseConstantFn<f64>, fan: &WaveFan<f64>, x0: f64, t: f64, domain: (f64, f64), h: f64) -> f64 {
    let mut cuts: Vec<f64> = profile.breakpoints().to_vec();
    for w in &fan.waves {
        cuts.push(x0 + w.speed_l() * t);
        cuts.push(x0 + w.speed_r() * t);
    }
    let n = ((domain.1 - domain.0) / h).ceil().max(1.0) as usize;
    cuts.extend((0..=n).map(|k| domain.0 + (domain.1 - domain.0) * k as f64 / n as f64));
    cuts.retain(|&c| c >= domain.0 && c <= domain.1);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let g = [(0.861_136_311_594_052_6, 0.347_854_845_137_453_9), (0.339_981_043_584_856_3, 0.652_145_154_862_546_1)];
    let mut acc = 0.0;
    for w in cuts.windows(2) {
        let (m, r) = ((w[0] + w[1]) / 2.0, (w[1] - w[0]) / 2.0);
        for &(z, wt) in &g {
            for x in [m - r * z, m + r * z] {
                acc += wt * r * (profile.eval(x) - fan.evaluate((x - x0) / t)).norm();
            }
        }
    }
    acc
}

/// Profile of the solution at its final time, and a quadrature step fine
/// enough for it.
pub fn final_profile(sol: &Solution) -> (PiecewiseConstantFn<f64>, f64) {
    match sol {
        Solution::Grid(g) => (g.to_pc(g.last()), g.dx),
        Solution::Fronts(f) => (f.at(f.t_final), 1e-3),
    }
}
