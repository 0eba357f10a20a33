//! Pseudo-spectral laboratory for passive-scalar advection-diffusion on the
//! periodic torus, driven by velocity fields of the form
//! `u(t,x) = sum_j u_j(x) eta_j(t)` with stationary Ornstein-Uhlenbeck
//! coefficients `eta_j`.
//!
//! The crate splits into:
//! - [`spectral`]: zero-mean fields on `T^d` (`d = 2, 3`) as truncated
//!   Hermitian-symmetric Fourier coefficient lattices, homogeneous Sobolev
//!   norms, derivatives, dealiased products.
//! - [`velocity`]: divergence-free trigonometric velocity families, the
//!   noise-geometry parameters (epsilon, mu), the eddy-diffusivity operator
//!   and the generator `A = kappa*Laplacian + L` with its principal
//!   eigenvalue.
//! - [`ou`]: exact sampling of stationary OU processes, iterated time
//!   integrals and their closed-form conditional means.
//! - [`solver`]: pathwise integrating-factor RK4 for the advection-diffusion
//!   equation and the deterministic effective equation.
//! - [`diagnostics`]: mix-norm errors, Holder functionals, the residual
//!   process, dissipation bound checks, high-mode transfer.
//! - [`harness`]: configuration, reproducible ensembles, parameter sweeps,
//!   CSV/SVG reporting.


pub mod error;

pub mod ou;
pub mod parallel;

pub mod spectral;
pub mod velocity;

pub use error::{Error, Result};
