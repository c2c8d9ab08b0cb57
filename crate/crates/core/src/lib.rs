//! Piecewise-linear finite elements in space and an implicit-Euler scheme with
//! Riemann–Liouville convolution weights in time for the time-fractional
//! Fokker–Planck equation
//!
//! `∂_t u - ∂_x(∂_t^{1-α} κ ∂_x u - F ∂_t^{1-α} u) = 0` on an interval,
//!
//! with homogeneous Dirichlet or zero-flux boundary conditions.

// NaN has to fail the `!(x > 0.0)` style guards
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod assembly;
pub mod config;
pub mod error;
pub mod fracweights;
pub mod meshes;
pub mod quadrature;
pub mod stepper;
pub mod tridiag;

pub use assembly::{DriftField, InitMethod, InitialData};
pub use config::{ExperimentConfig, InitChoice, Scale};
pub use error::{Error, Result};
pub use fracweights::{FractionalOrder, WeightRow};
pub use meshes::{BoundaryCondition, SpatialMesh, TimeGrid};
pub use stepper::{Scheme, SolutionHistory, StepReport};
pub use tridiag::{solve_tridiagonal, TriDiagMatrix};

/// Library version recorded in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
