//! Approximation schemes: grid methods, random choice, front tracking,
//! viscous and relaxation approximations.

mod backward_euler;
mod front_tracking;
mod glimm;
mod godunov;
mod grid;
mod jin_xin;
mod mol;
mod mollification;
mod pc;
mod speeds;
mod viscous;

pub use backward_euler::backward_euler_run;
pub use front_tracking::{
    decimal_rational, front_tracking_run, Front, FrontKind, FrontNumber, FrontTrackingSolution, Interaction,
};
pub use glimm::{glimm_run, reversed_digit_theta, uniformity_defect, van_der_corput};
pub use godunov::godunov_run;
pub(crate) use grid::gauss5;
pub use grid::{
    Boundary, DiffusionSelector, GridSolution, InitialData, MollifierKernel, SchemeConfig, Snapshot, StepRecord,
    ThetaSequence,
};
pub use jin_xin::jin_xin_run;
pub use mol::method_of_lines_run;
pub use mollification::{blowup_time, mollification_run};
pub use pc::PiecewiseConstantFn;
pub use viscous::{lax_friedrichs_run, nonlinear_diffusion_run, viscous_run};
