//! Divergence-free velocity families and their noise geometry.
//!
//! A family is a finite list of time-independent vector fields `u_j` on
//! `T^d`; the actual velocity is `u(t,x) = sum_j u_j(x) eta_j(t)` with OU
//! coefficients supplied elsewhere. The default construction is
//! trigonometric, Kraichnan-style: for a wavevector `k` and a polarization
//! `sigma` with `sigma . k = 0`, the fields `a sigma cos(k.x)` and
//! `a sigma sin(k.x)` are divergence-free by construction, and summing both
//! phases over `d-1` polarizations and an isotropic set of wavevectors makes
//! `a(x) = sum_j u_j u_j^t` a constant multiple of the identity.

mod eddy;
mod family;
mod geometry;

pub use eddy::{apply_eddy_diffusivity, eddy_operator_norm, GeneratorA};
pub use family::{build_trig_family, half_shell, FamilyPattern, VectorField, VelocityFamily};
pub use geometry::{epsilon, isotropy_matrix, mu, noise_geometry, IsotropyReport, MuBreakdown, NoiseGeometry};
