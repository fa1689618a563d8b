//! Quadrature on the sphere and ball, and deterministic uniformly
//! distributed dipole point sets.
//!
//! The dipole construction is a Fibonacci (golden-angle) lattice: a
//! deterministic low-discrepancy point set, so every downstream convergence
//! test is reproducible without seeds. Orientations cycle r̂, θ̂, φ̂ in
//! lattice-index order, which equidistributes the three directions.

use crate::cvec3::Orientation;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::io::Write;

/// A point on the unit sphere, θ ∈ [0, π], φ ∈ [0, 2π).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherePoint {
    pub theta: f64,
    pub phi: f64,
}

impl SpherePoint {
    pub fn new(theta: f64, phi: f64) -> Self {
        SpherePoint { theta, phi }
    }

    /// Cartesian unit vector.
    pub fn unit_xyz(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1]; exact for polynomials of
/// degree ≤ 2·order − 1.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "gauss_legendre: order must be >= 1");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev-like initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_p_dp(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 * (1.0 + x.abs()) {
                let (p2, d2) = legendre_p_dp(n, x);
                dp = d2;
                x -= p2 / d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// (P_n(x), P_n′(x)) by upward recurrence.
fn legendre_p_dp(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Product quadrature rule over the unit sphere: Gauss–Legendre in cos θ ×
/// uniform in φ. Solid-angle weights sum to 4π.
#[derive(Clone, Debug)]
pub struct SurfaceRule {
    pub nodes: Vec<SpherePoint>,
    pub weights: Vec<f64>,
    n_theta: usize,
    n_phi: usize,
}

impl SurfaceRule {
    /// Rule integrating products Y_nm Y_{n′m′}* exactly (to rounding) for
    /// n, n′ ≤ n_max: order n_max+1 in θ, 2·n_max+1 points in φ.
    pub fn for_degree(n_max: u32) -> SurfaceRule {
        Self::with_orders(n_max as usize + 1, 2 * n_max as usize + 1)
    }

    pub fn with_orders(n_theta: usize, n_phi: usize) -> SurfaceRule {
        assert!(n_theta >= 1 && n_phi >= 1);
        let (u_nodes, u_weights) = gauss_legendre(n_theta);
        let w_phi = 2.0 * PI / n_phi as f64;
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (u, wu) in u_nodes.iter().zip(&u_weights) {
            let theta = u.acos();
            for j in 0..n_phi {
                let phi = w_phi * j as f64;
                nodes.push(SpherePoint::new(theta, phi));
                weights.push(wu * w_phi);
            }
        }
        SurfaceRule { nodes, weights, n_theta, n_phi }
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn integrate(&self, mut f: impl FnMut(&SpherePoint) -> Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (pt, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(pt) * *w;
        }
        acc
    }

    pub fn integrate_real(&self, mut f: impl FnMut(&SpherePoint) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(pt, w)| f(pt) * w).sum()
    }
}

/// Ball quadrature: a surface rule × Gauss–Legendre radial rule mapped to
/// (0, R] with the r² Jacobian folded into the radial weights, so the
/// weights sum to the ball volume (4/3)πR³.
#[derive(Clone, Debug)]
pub struct BallRule {
    pub surface: SurfaceRule,
    pub radial_nodes: Vec<f64>,
    /// Radial weights including the r² Jacobian.
    pub radial_weights: Vec<f64>,
}

impl BallRule {
    pub fn new(n_max: u32, radial_order: usize, radius: f64) -> Result<BallRule> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::domain(format!("BallRule: radius must be > 0, got {radius}")));
        }
        let surface = SurfaceRule::for_degree(n_max);
        let (t, wt) = gauss_legendre(radial_order);
        let radial_nodes: Vec<f64> = t.iter().map(|t| radius * (t + 1.0) / 2.0).collect();
        let radial_weights: Vec<f64> = radial_nodes
            .iter()
            .zip(&wt)
            .map(|(r, w)| radius / 2.0 * w * r * r)
            .collect();
        Ok(BallRule { surface, radial_nodes, radial_weights })
    }

    pub fn integrate(&self, mut f: impl FnMut(f64, &SpherePoint) -> Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (r, wr) in self.radial_nodes.iter().zip(&self.radial_weights) {
            for (pt, ws) in self.surface.nodes.iter().zip(&self.surface.weights) {
                acc += f(*r, pt) * (wr * ws);
            }
        }
        acc
    }

    pub fn integrate_real(&self, mut f: impl FnMut(f64, &SpherePoint) -> f64) -> f64 {
        let mut acc = 0.0;
        for (r, wr) in self.radial_nodes.iter().zip(&self.radial_weights) {
            for (pt, ws) in self.surface.nodes.iter().zip(&self.surface.weights) {
                acc += f(*r, pt) * wr * ws;
            }
        }
        acc
    }
}

/// N dipole positions on the sphere of radius `radius` with cyclically
/// assigned orientations.
#[derive(Clone, Debug)]
pub struct DipoleSet {
    pub radius: f64,
    pub points: Vec<SpherePoint>,
    pub orientations: Vec<Orientation>,
}

const GOLDEN_ANGLE: f64 = 2.399963229728653; // 2π(1 − 1/φ)

/// Deterministic Fibonacci-lattice dipole set; same N gives bit-identical
/// points. Minimum pairwise chordal distance is checked at construction
/// against the calibrated bound 1.0·radius/√N.
pub fn fibonacci_sphere(n: usize, radius: f64) -> Result<DipoleSet> {
    if n < 1 {
        return Err(Error::domain("fibonacci_sphere: N must be >= 1".to_string()));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::domain(format!("fibonacci_sphere: radius must be > 0, got {radius}")));
    }
    let mut points = Vec::with_capacity(n);
    let mut orientations = Vec::with_capacity(n);
    for i in 0..n {
        // Midpoint offset keeps points away from the poles.
        let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
        let theta = z.clamp(-1.0, 1.0).acos();
        let phi = (GOLDEN_ANGLE * i as f64).rem_euclid(2.0 * PI);
        points.push(SpherePoint::new(theta, phi));
        orientations.push(Orientation::cycle(i));
    }
    let set = DipoleSet { radius, points, orientations };
    if n > 1 {
        let min_dist = set.min_chordal_distance();
        let bound = radius / (n as f64).sqrt();
        if min_dist < bound {
            return Err(Error::config(format!(
                "fibonacci_sphere: minimum spacing {min_dist:.3e} below bound {bound:.3e} at N = {n}"
            )));
        }
    }
    Ok(set)
}

impl DipoleSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Minimum pairwise chordal distance. For the Fibonacci lattice the
    /// nearest neighbour of point i sits at an index offset that is a
    /// Fibonacci number, so scanning those offsets finds the global minimum
    /// without the O(N²) pair loop (verified against brute force in tests).
    pub fn min_chordal_distance(&self) -> f64 {
        let n = self.points.len();
        if n < 2 {
            return f64::INFINITY;
        }
        let xyz: Vec<[f64; 3]> = self.points.iter().map(|p| p.unit_xyz()).collect();
        let mut offsets: Vec<usize> = vec![1, 2, 3, 4];
        let (mut a, mut b) = (3usize, 5usize);
        while b < n {
            offsets.push(b);
            let c = a + b;
            a = b;
            b = c;
        }
        let mut min2 = f64::INFINITY;
        for i in 0..n {
            for &d in &offsets {
                if i + d >= n {
                    break;
                }
                let p = xyz[i];
                let q = xyz[i + d];
                let dd = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2);
                if dd < min2 {
                    min2 = dd;
                }
            }
        }
        self.radius * min2.sqrt()
    }

    /// Brute-force minimum chordal distance, O(N²); test oracle for
    /// [`min_chordal_distance`].
    pub fn min_chordal_distance_exhaustive(&self) -> f64 {
        let n = self.points.len();
        if n < 2 {
            return f64::INFINITY;
        }
        let xyz: Vec<[f64; 3]> = self.points.iter().map(|p| p.unit_xyz()).collect();
        let mut min2 = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                let (p, q) = (xyz[i], xyz[j]);
                let dd = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2);
                if dd < min2 {
                    min2 = dd;
                }
            }
        }
        self.radius * min2.sqrt()
    }

    /// CSV export: `q,theta,phi,orientation` with q 1-based.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "q,theta,phi,orientation")?;
        for (i, (pt, o)) in self.points.iter().zip(&self.orientations).enumerate() {
            writeln!(w, "{},{},{},{}", i + 1, pt.theta, pt.phi, o.label())?;
        }
        Ok(())
    }
}

/// |(4π/N) Σ_q f(s_q) − ∫_S f dΩ| with the integral taken by `reference`.
pub fn uniformity_defect(
    set: &DipoleSet,
    mut f: impl FnMut(&SpherePoint) -> Complex64,
    reference: &SurfaceRule,
) -> f64 {
    let n = set.points.len() as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for pt in &set.points {
        sum += f(pt);
    }
    let mean = sum * (4.0 * PI / n);
    let integral = reference.integrate(&mut f);
    (mean - integral).norm()
}
