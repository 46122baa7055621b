//! Numerical laboratory for the birth of a cut in unitary random-matrix
//! ensembles.
//!
//! The crate is layered bottom-up:
//!
//! - [`numerics`]: extended precision, polynomials, weighted quadrature,
//!   principal values, root finding and Chebyshev-series log potentials.
//! - [`equilibrium`]: one-cut equilibrium measures of `V/t`, effective
//!   potentials, critical-point detection and synthesis of potentials whose
//!   effective potential touches zero at an exterior point `x*`.
//! - [`ansatz`]: the approximate equilibrium measure for `t > 1`, with a
//!   newborn band of width `σ_t` around `x*`.
//! - [`orthopoly`]: Stieltjes recurrences in extended precision,
//!   Christoffel–Darboux kernels and weighted Cauchy transforms.
//! - [`rht`]: scalar Riemann–Hilbert objects (g-function, `F`, `K`, `Π`,
//!   `S^∞`, the conformal map `ζ`, `τ_t`, `Z_t`) and a jump-residual harness.
//! - [`lab`]: experiment configuration, sweeps, identity suites and
//!   CSV/SVG output.

pub mod ansatz;
pub mod equilibrium;
pub mod error;
pub mod lab;
pub mod numerics;
pub mod orthopoly;
pub mod rht;

pub use error::{Error, Result};
