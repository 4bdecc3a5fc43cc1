//! Ground states, sharp Hardy-Gagliardo-Nirenberg constants and radial
//! dynamics for the focusing nonlinear Schrodinger equation
//!
//! ```text
//! i u_t = (-Laplacian - c |x|^{-2}) u - |u|^{p-2} u,   x in R^d,
//! ```
//!
//! with a (critical or subcritical) inverse-square potential.
//!
//! All radial computations are carried out on the regularised profile
//! `v = r^kappa u`, which removes the singular potential exactly and turns the
//! problem into one in the effective dimension `n = d - 2 kappa` with a
//! power weight `r^{-sigma}` on the nonlinearity.

pub mod bessel;
pub mod classify;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod ground_state;
pub mod io;
pub mod linalg;
pub mod ode;
pub mod params;
pub mod pohozaev;
pub mod quadrature;
pub mod variational;

pub use error::{Error, Result};
pub use ground_state::{GroundState, ShootOptions};
pub use params::{DerivedConstants, ModelParams};
pub use quadrature::{Estimate, RadialProfile, SoftplusGrid};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
