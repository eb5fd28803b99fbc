//! Pseudospectral toolkit for the free-boundary incompressible Euler system
//! with vorticity over a flat bottom.
//!
//! The crate is organized bottom-up:
//!
//! * [`spectral`]: periodic grids, FFTs, Littlewood–Paley blocks, norms.
//! * [`paradiff`]: paraproducts, Bony remainders, paradifferential operators.
//! * [`geometry`]: the regularized flattening map and its elliptic coefficients.
//! * [`elliptic`]: strip solvers (direct residual correction and parabolic factorization).
//! * [`dn`] and [`pressure`]: Dirichlet–Neumann operator, paralinearization, pressure and
//!   Taylor coefficient.
//! * [`dynamics`]: wave state, velocity recovery, right-hand side and RK4 stepping.
//! * [`diagnostics`]: energies, curvature, symmetrizer energy, break-down monitor.
//! * [`io`]: configuration, snapshots, CSV output and run orchestration.
//! * [`checks`]: the invariant suite behind `ww check`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod checks;
pub mod diagnostics;
pub mod dn;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod geometry;
pub mod io;
pub mod paradiff;
pub mod pressure;
pub mod spectral;

pub use error::{Error, Result};
