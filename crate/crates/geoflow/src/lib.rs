//! Geodesic flows on metric Lie algebras.
//!
//! Euler's rigid-body equations, the truncated inviscid Burgers equation,
//! and 2D incompressible Euler flow are all geodesic equations for
//! left-invariant metrics; this crate provides the shared algebraic engine
//! (brackets, deformation operator, curvature biquadratic), the concrete
//! model algebras, geodesic integration with conserved-quantity monitoring,
//! rigid-body stability criteria, a spectral 2D Euler solver, and a
//! Clebsch-variable 3D solver.
//!
//! Start with the `examples/` directory: there is one runnable example per
//! capability. A thin `geoflow` binary exposes the same experiments as CLI
//! subcommands.

pub mod algebra;
pub mod clebsch;
pub mod cli;
pub mod error;
pub mod euler2d;
pub mod geodesic;
pub mod models;
pub mod ode;
pub mod rigid;

pub use algebra::{AlgebraVector, CurvatureReport, MetricLieAlgebra};
pub use error::{Error, Result};
