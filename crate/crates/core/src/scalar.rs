//! Floating-point abstraction shared by every solver in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar type the solvers are generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Multiplier applied to tolerances calibrated for `f64`.
    fn tol_scale() -> Self;
    /// Base step for central finite differences.
    fn fd_step() -> Self;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn tol_scale() -> Self {
        1.0
    }
    fn fd_step() -> Self {
        1e-6
    }
}

impl Scalar for f32 {
    fn tol_scale() -> Self {
        2.0e4
    }
    fn fd_step() -> Self {
        1e-3
    }
}

/// Shorthand for [`Scalar::lit`].
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::lit(x)
}

/// Named tolerances used across the crate.
///
/// Values are calibrated for `f64`; for other scalar types they are scaled
/// by [`Scalar::tol_scale`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerances<T> {
    /// Eigen-decomposition residuals and biorthogonality.
    pub eig: T,
    /// Entropy / entropy-flux compatibility residual.
    pub eef: T,
    /// Linear degeneracy threshold for the directional derivative of an eigenvalue.
    pub ld: T,
    /// Minimum gap between consecutive eigenvalues.
    pub gap: T,
    /// Rankine–Hugoniot residual.
    pub rh: T,
    /// Riemann-problem terminal mismatch.
    pub rp: T,
    /// Admissibility margin slack.
    pub adm: T,
    /// Wave-ordering slack.
    pub order: T,
    /// Tangency of a shock curve to the eigenvector at its base point.
    pub curve: T,
}

impl<T: Scalar> Tolerances<T> {
    pub fn standard() -> Self {
        let s = T::tol_scale();
        Self {
            eig: lit::<T>(1e-9) * s,
            eef: lit::<T>(1e-6) * s,
            ld: lit::<T>(1e-8) * s,
            gap: lit::<T>(1e-8) * s,
            rh: lit::<T>(1e-9) * s,
            rp: lit::<T>(1e-10) * s,
            adm: lit::<T>(1e-9) * s,
            order: lit::<T>(1e-9) * s,
            curve: lit::<T>(1e-5) * s,
        }
    }
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        Self::standard()
    }
}

/// Central-difference step for a coordinate of magnitude `x`.
#[inline]
pub(crate) fn fd_step_at<T: Scalar>(x: T) -> T {
    T::fd_step() * (T::one() + x.abs())
}
