//! Diagnostics for approximate solutions: jump detection, weak and entropy
//! residuals, ε-approximate certificates, error decompositions against a
//! reference evolution, and convergence-rate fits.

mod certificate;
mod decomposition;
mod jumps;
mod qdecomp;
mod rate;
mod space_time;
mod tv;
mod weak;

pub use certificate::{certify_eps_approx, CertifyOptions, EpsCertificate};
pub use decomposition::{
    error_decomposition, semigroup_error_bound, DecompositionTerms, ErrorDecomposition, FanOracle, GodunovOracle, JumpAt,
    Oracle, SemigroupBound,
};
pub use jumps::{detect_jumps, JumpOptions, JumpRecord};
pub use qdecomp::{q_decomposition, strengths_between, QDecomposition};
pub use rate::{rate_fit, RateFit, RateModel};
pub use space_time::{CharacteristicSolution, SimpleWaveSolution, SpaceTime, Stationary, TravelingStep};
pub use tv::{interval_partition, l1_distance, total_variation, Profile};
pub use weak::{
    entropy_residual, eps_for, weak_residual, FamilyDescriptor, ResidualKind, StripResidual, TestFamily, TestResidual,
    Window,
};
