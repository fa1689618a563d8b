//! Complex 3-vectors in the local spherical basis (r̂, θ̂, φ̂).

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

/// Dipole / field-component direction in the local spherical frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Orientation {
    Radial,
    Theta,
    Phi,
}

impl Orientation {
    /// Cyclic assignment r̂, θ̂, φ̂ by zero-based index.
    pub fn cycle(index: usize) -> Self {
        match index % 3 {
            0 => Orientation::Radial,
            1 => Orientation::Theta,
            _ => Orientation::Phi,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Orientation::Radial => "r",
            Orientation::Theta => "theta",
            Orientation::Phi => "phi",
        }
    }
}

/// A complex vector with components along (r̂, θ̂, φ̂) at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CVec3 {
    pub r: Complex64,
    pub theta: Complex64,
    pub phi: Complex64,
}

impl CVec3 {
    pub const ZERO: CVec3 = CVec3 {
        r: Complex64::new(0.0, 0.0),
        theta: Complex64::new(0.0, 0.0),
        phi: Complex64::new(0.0, 0.0),
    };

    pub fn new(r: Complex64, theta: Complex64, phi: Complex64) -> Self {
        CVec3 { r, theta, phi }
    }

    /// |v|² = Σ |component|².
    pub fn norm_sqr(&self) -> f64 {
        self.r.norm_sqr() + self.theta.norm_sqr() + self.phi.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Unconjugated dot product Σ aᵢbᵢ.
    pub fn dot(&self, other: &CVec3) -> Complex64 {
        self.r * other.r + self.theta * other.theta + self.phi * other.phi
    }

    /// Hermitian dot product Σ aᵢ* bᵢ.
    pub fn conj_dot(&self, other: &CVec3) -> Complex64 {
        self.r.conj() * other.r + self.theta.conj() * other.theta + self.phi.conj() * other.phi
    }

    /// Projection onto a real unit vector of the spherical frame.
    pub fn component(&self, o: Orientation) -> Complex64 {
        match o {
            Orientation::Radial => self.r,
            Orientation::Theta => self.theta,
            Orientation::Phi => self.phi,
        }
    }

    /// Radial component of the cross product, (a × b)·r̂ = aθbφ − aφbθ.
    pub fn cross_radial(&self, other: &CVec3) -> Complex64 {
        self.theta * other.phi - self.phi * other.theta
    }

    pub fn conj(&self) -> CVec3 {
        CVec3::new(self.r.conj(), self.theta.conj(), self.phi.conj())
    }

    pub fn is_finite(&self) -> bool {
        [self.r, self.theta, self.phi]
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl Add for CVec3 {
    type Output = CVec3;
    fn add(self, o: CVec3) -> CVec3 {
        CVec3::new(self.r + o.r, self.theta + o.theta, self.phi + o.phi)
    }
}

impl Sub for CVec3 {
    type Output = CVec3;
    fn sub(self, o: CVec3) -> CVec3 {
        CVec3::new(self.r - o.r, self.theta - o.theta, self.phi - o.phi)
    }
}

impl Neg for CVec3 {
    type Output = CVec3;
    fn neg(self) -> CVec3 {
        CVec3::new(-self.r, -self.theta, -self.phi)
    }
}

impl Mul<Complex64> for CVec3 {
    type Output = CVec3;
    fn mul(self, c: Complex64) -> CVec3 {
        CVec3::new(self.r * c, self.theta * c, self.phi * c)
    }
}

impl Mul<f64> for CVec3 {
    type Output = CVec3;
    fn mul(self, c: f64) -> CVec3 {
        CVec3::new(self.r * c, self.theta * c, self.phi * c)
    }
}
