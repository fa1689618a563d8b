//! Fully normalized associated Legendre functions and scalar spherical
//! harmonics with their tangential gradients.
//!
//! Normalization is chosen so that Y_nm(θ,φ) = P̄_nm(cos θ) e^{imφ} is an
//! orthonormal basis of L²(S²). The Condon–Shortley phase is included, fixed
//! once here: with it, Y_{n,−m} = (−1)^m Y_nm*. Only products like
//! u_p*·u_{p′} are observable downstream, which are convention-invariant.

use crate::cvec3::CVec3;
use crate::error::{Error, Result};
use num_complex::Complex64;

const INV_SQRT_4PI: f64 = 0.28209479177387814; // 1/√(4π)

fn check_order(n: u32, m: i32, what: &str) -> Result<()> {
    if m.unsigned_abs() > n {
        return Err(Error::domain(format!("{what}: |m| = {} exceeds n = {n}", m.unsigned_abs())));
    }
    Ok(())
}

/// P̄_nm(u) for one (n, m), |u| ≤ 1, stable to n = 200.
///
/// Uses the diagonal seed P̄_mm followed by the standard n-increasing
/// three-term recurrence; the fully normalized values stay O(√n), so no
/// overflow occurs where unnormalized P_nm would blow up near n ≈ 150.
pub fn assoc_legendre_normalized(n: u32, m: i32, u: f64) -> Result<f64> {
    check_order(n, m, "assoc_legendre_normalized")?;
    if !u.is_finite() || u.abs() > 1.0 {
        return Err(Error::domain(format!("assoc_legendre_normalized: u must lie in [-1, 1], got {u}")));
    }
    let ma = m.unsigned_abs();
    let v = pbar_positive(n, ma, u);
    // P̄_{n,−m} = (−1)^m P̄_{n,m}
    if m < 0 && ma % 2 == 1 {
        Ok(-v)
    } else {
        Ok(v)
    }
}

/// P̄_{n,m} for m ≥ 0 via diagonal seed + upward-in-n recurrence.
fn pbar_positive(n: u32, m: u32, u: f64) -> f64 {
    let s = ((1.0 - u) * (1.0 + u)).max(0.0).sqrt();
    let mut pmm = INV_SQRT_4PI;
    for k in 1..=m {
        pmm *= -(((2 * k + 1) as f64) / ((2 * k) as f64)).sqrt() * s;
    }
    if n == m {
        return pmm;
    }
    let mut p_prev = pmm;
    let mut p_cur = ((2 * m + 3) as f64).sqrt() * u * pmm;
    for l in m + 2..=n {
        let lf = l as f64;
        let mf = m as f64;
        let a = (((2.0 * lf + 1.0) * (2.0 * lf - 1.0)) / ((lf - mf) * (lf + mf))).sqrt();
        let b = (((lf - 1.0 + mf) * (lf - 1.0 - mf)) / ((2.0 * lf - 1.0) * (2.0 * lf - 3.0))).sqrt();
        let p_next = a * (u * p_cur - b * p_prev);
        p_prev = p_cur;
        p_cur = p_next;
    }
    p_cur
}

/// Scalar spherical harmonic Y_nm(θ, φ) = P̄_nm(cos θ) e^{imφ}.
pub fn sph_harmonic(n: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    let p = assoc_legendre_normalized(n, m, theta.cos())?;
    Ok(Complex64::from_polar(1.0, m as f64 * phi) * p)
}

/// Unit-sphere surface gradient ∇Y_nm = (∂Y/∂θ) θ̂ + (imY/sin θ) φ̂.
///
/// The θ derivative comes from the ladder identity
/// 2 ∂θ P̄_nm = √((n−m)(n+m+1)) P̄_{n,m+1} − √((n+m)(n−m+1)) P̄_{n,m−1},
/// which has no 1/sinθ and evaluates correctly at the poles, where only the
/// |m| = 1 components survive. At an exact pole the φ̂ part uses the
/// L'Hôpital limit P̄/sinθ → ∂θP̄ / cosθ.
pub fn sph_harmonic_gradient(n: u32, m: i32, theta: f64, phi: f64) -> Result<CVec3> {
    check_order(n, m, "sph_harmonic_gradient")?;
    let u = theta.cos();
    let s = theta.sin();
    let phase = Complex64::from_polar(1.0, m as f64 * phi);

    let dtheta = dtheta_pbar(n, m, u);
    let theta_comp = phase * dtheta;

    let phi_comp = if m == 0 {
        Complex64::new(0.0, 0.0)
    } else if s == 0.0 {
        // Exact pole: P̄_nm / sinθ → ∂θP̄_nm / cosθ for |m| = 1, else 0.
        if m.unsigned_abs() == 1 {
            Complex64::new(0.0, m as f64) * phase * (dtheta / u)
        } else {
            Complex64::new(0.0, 0.0)
        }
    } else {
        let p = signed_pbar(n, m, u);
        Complex64::new(0.0, m as f64) * phase * (p / s)
    };

    Ok(CVec3::new(Complex64::new(0.0, 0.0), theta_comp, phi_comp))
}

fn signed_pbar(n: u32, m: i32, u: f64) -> f64 {
    let ma = m.unsigned_abs();
    if ma > n {
        return 0.0;
    }
    let v = pbar_positive(n, ma, u);
    if m < 0 && ma % 2 == 1 {
        -v
    } else {
        v
    }
}

fn dtheta_pbar(n: u32, m: i32, u: f64) -> f64 {
    let nf = n as f64;
    let mf = m as f64;
    let a = ((nf - mf) * (nf + mf + 1.0)).max(0.0).sqrt();
    let b = ((nf + mf) * (nf - mf + 1.0)).max(0.0).sqrt();
    0.5 * (a * signed_pbar(n, m + 1, u) - b * signed_pbar(n, m - 1, u))
}

/// Table of P̄_nm and ∂θP̄_nm for all 0 ≤ |m| ≤ n ≤ n_max at one θ, shared
/// across the modes sampled at a point.
pub struct SphHarmonicTable {
    n_max: u32,
    sin_theta: f64,
    cos_theta: f64,
    // pbar[idx(n, m)] for 0 ≤ m ≤ n ≤ n_max
    pbar: Vec<f64>,
    dtheta: Vec<f64>,
}

impl SphHarmonicTable {
    pub fn new(n_max: u32, theta: f64) -> Self {
        let u = theta.cos();
        let s = theta.sin();
        let count = Self::len(n_max);
        let mut pbar = vec![0.0; count];
        for m in 0..=n_max {
            let mut col = ColumnIter::new(m, u, s);
            for n in m..=n_max {
                pbar[Self::idx(n_max, n, m)] = col.next_value(n);
            }
        }
        let mut dtheta = vec![0.0; count];
        for m in 0..=n_max {
            for n in m..=n_max {
                let nf = n as f64;
                let mf = m as f64;
                let a = ((nf - mf) * (nf + mf + 1.0)).max(0.0).sqrt();
                let b = ((nf + mf) * (nf - mf + 1.0)).max(0.0).sqrt();
                let up = if m + 1 <= n { pbar[Self::idx(n_max, n, m + 1)] } else { 0.0 };
                // P̄_{n,m−1} with m ≥ 1 sign handled below for m = 0 table entry
                let down = if m >= 1 {
                    pbar[Self::idx(n_max, n, m - 1)]
                } else {
                    // m − 1 = −1: P̄_{n,−1} = −P̄_{n,1}
                    if n >= 1 { -pbar[Self::idx(n_max, n, 1)] } else { 0.0 }
                };
                dtheta[Self::idx(n_max, n, m)] = 0.5 * (a * up - b * down);
            }
        }
        SphHarmonicTable { n_max, sin_theta: s, cos_theta: u, pbar, dtheta }
    }

    fn len(n_max: u32) -> usize {
        ((n_max + 1) * (n_max + 2) / 2) as usize
    }

    // Column-major by m: offset(m) = Σ_{j<m} (n_max+1-j)
    fn idx(n_max: u32, n: u32, m: u32) -> usize {
        let m = m as usize;
        let nmax = n_max as usize;
        let offset = m * (nmax + 1) - m * (m.saturating_sub(1)) / 2;
        offset + (n as usize - m)
    }

    pub fn pbar(&self, n: u32, m: i32) -> f64 {
        let ma = m.unsigned_abs();
        debug_assert!(n <= self.n_max && ma <= n);
        let v = self.pbar[Self::idx(self.n_max, n, ma)];
        if m < 0 && ma % 2 == 1 {
            -v
        } else {
            v
        }
    }

    fn dtheta(&self, n: u32, m: i32) -> f64 {
        let ma = m.unsigned_abs();
        let v = self.dtheta[Self::idx(self.n_max, n, ma)];
        // ∂θ P̄_{n,−m} = (−1)^m ∂θ P̄_{n,m}
        if m < 0 && ma % 2 == 1 {
            -v
        } else {
            v
        }
    }

    pub fn harmonic(&self, n: u32, m: i32, phi: f64) -> Complex64 {
        Complex64::from_polar(1.0, m as f64 * phi) * self.pbar(n, m)
    }

    /// Tangential surface gradient of Y_nm, same conventions as
    /// [`sph_harmonic_gradient`].
    pub fn gradient(&self, n: u32, m: i32, phi: f64) -> CVec3 {
        let phase = Complex64::from_polar(1.0, m as f64 * phi);
        let dt = self.dtheta(n, m);
        let theta_comp = phase * dt;
        let phi_comp = if m == 0 {
            Complex64::new(0.0, 0.0)
        } else if self.sin_theta == 0.0 {
            if m.unsigned_abs() == 1 {
                Complex64::new(0.0, m as f64) * phase * (dt / self.cos_theta)
            } else {
                Complex64::new(0.0, 0.0)
            }
        } else {
            Complex64::new(0.0, m as f64) * phase * (self.pbar(n, m) / self.sin_theta)
        };
        CVec3::new(Complex64::new(0.0, 0.0), theta_comp, phi_comp)
    }
}

/// Incremental evaluator of one m-column of P̄, n increasing.
struct ColumnIter {
    m: u32,
    u: f64,
    prev: f64,
    cur: f64,
    next_n: u32,
}

impl ColumnIter {
    fn new(m: u32, u: f64, s: f64) -> Self {
        let mut pmm = INV_SQRT_4PI;
        for k in 1..=m {
            pmm *= -(((2 * k + 1) as f64) / ((2 * k) as f64)).sqrt() * s;
        }
        ColumnIter { m, u, prev: 0.0, cur: pmm, next_n: m }
    }

    fn next_value(&mut self, n: u32) -> f64 {
        debug_assert_eq!(n, self.next_n);
        self.next_n += 1;
        if n == self.m {
            return self.cur;
        }
        let value = if n == self.m + 1 {
            ((2 * self.m + 3) as f64).sqrt() * self.u * self.cur
        } else {
            let lf = n as f64;
            let mf = self.m as f64;
            let a = (((2.0 * lf + 1.0) * (2.0 * lf - 1.0)) / ((lf - mf) * (lf + mf))).sqrt();
            let b = (((lf - 1.0 + mf) * (lf - 1.0 - mf)) / ((2.0 * lf - 1.0) * (2.0 * lf - 3.0))).sqrt();
            a * (self.u * self.cur - b * self.prev)
        };
        self.prev = self.cur;
        self.cur = value;
        value
    }
}
