//! One-dimensional discontinuous Galerkin solver for the
//! viscosity-capillarity regularized elastodynamics system
//!
//! ```text
//! du/dt - dv/dx               = 0
//! dv/dt - d(W'(u))/dx = mu d2v/dx2 - gamma d3u/dx3
//! ```
//!
//! with a non-convex stored energy W. The crate provides the broken
//! Legendre spaces, the one-sided discrete gradients and interior-penalty
//! Laplacian, the semi-discrete scheme with Crank-Nicolson/Newton time
//! stepping, relative-entropy diagnostics, the projection operators used in
//! the stability analysis, and a convergence-study harness with independent
//! operator oracles.

pub mod basis;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod mesh;
pub mod ops;
pub mod verify;

pub use error::{Error, Result};
