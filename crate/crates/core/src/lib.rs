//! Physical channel model for a transmitter confined to a ball, decomposed
//! into spherical vector wavefunctions: per-mode transmit power and
//! radiation resistance, a uniformly distributed dipole receive array on a
//! surrounding sphere, and the MIMO capacity of the resulting channel,
//! together with the limit identities the construction satisfies
//! (orthogonality of the sampled mode matrix, capacity → (αP/N₀)·log₂e,
//! received power → α × transmit power).
//!
//! Layering, bottom up: [`specfun`] (spherical Bessel/Legendre/harmonics) →
//! [`geometry`] (quadrature, Fibonacci dipole lattice) → [`wavefunctions`]
//! (modes, norms, singular values) → [`power`] (transmit coefficients and
//! the Poynting oracle) → [`channel`] (Y = gΦΣX + Z assembly) →
//! [`capacity`] / [`dof`] (water-filling, limits, mode counting).

pub mod capacity;
pub mod channel;
pub mod cvec3;
pub mod dof;
mod error;
pub mod geometry;
pub mod power;
pub mod report;
pub mod specfun;
pub mod wavefunctions;

pub use error::{Error, Result};
