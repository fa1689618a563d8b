//! Scalar special functions: spherical Bessel/Neumann/Hankel functions,
//! normalized associated Legendre functions, and scalar spherical harmonics
//! with tangential gradients.
//!
//! All operations are pure functions of their arguments with no shared
//! mutable state, safe to call from any number of threads. Accuracy budget
//! is ~1e-13 relative so that downstream 1e-6 physics tolerances are never
//! special-function-limited.

mod bessel;
mod legendre;

pub use bessel::{
    sph_bessel_j, sph_bessel_j_column, sph_bessel_y, sph_hankel1, sph_hankel1_logderiv,
};
pub use legendre::{
    assoc_legendre_normalized, sph_harmonic, sph_harmonic_gradient, SphHarmonicTable,
};
