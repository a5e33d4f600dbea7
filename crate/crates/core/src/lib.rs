//! Riemann solvers, approximation schemes and verification diagnostics for
//! one-dimensional hyperbolic systems of conservation laws `u_t + f(u)_x = 0`.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix `f64`, which is what the CLI uses.

pub mod error;
pub mod linalg;
pub mod models;
pub mod riemann;
pub mod scalar;
pub mod schemes;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{Mat, State, MAX_DIM};
pub use scalar::{Scalar, Tolerances};

pub type State64 = State<f64>;
pub type Model64 = models::FluxModel<f64>;
