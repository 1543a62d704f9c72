//! Mimetic staggered-grid discretizations of first-order wave systems.
//!
//! Every time-dependent solver in this crate is a leapfrog scheme written over a
//! pair of operators that are adjoint in weighted inner products. That structure
//! gives each scheme two exactly conserved quadratic quantities, which the
//! solvers report alongside their fields.
//!
//! Module map:
//! - [`oscillator`]: scalar harmonic oscillator reference problem.
//! - [`leapfrog`]: the generic leapfrog integrator over an adjoint pair.
//! - [`wave1d`]: 1D wave equation with constant or variable materials.
//! - [`mimetic3d`]: 3D primal/dual grids, difference operators, stars, inner products.
//! - [`wave3d`]: scalar wave and Maxwell (Yee) solvers built on [`mimetic3d`].
//! - [`wave2d`]: 2D staggered wave solver with homogeneous Dirichlet walls.
//! - [`positivity`]: upwind transport and explicit diffusion that keep densities non-negative.
//! - [`cli`]: the `mimetic` command line driver.

// `!(x > 0.0)` is used on purpose so that NaN is rejected along with non-positive
// values. Stencils read more clearly with explicit indices.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod leapfrog;
pub mod mimetic3d;
pub mod oscillator;
pub mod positivity;
pub mod wave1d;
pub mod wave2d;
pub mod wave3d;

pub use error::{Error, Result};
