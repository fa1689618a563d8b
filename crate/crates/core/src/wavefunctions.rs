//! Vector spherical wavefunctions: radiating modes U_p built on hₙ⁽¹⁾
//! (valid outside the source region) and regular modes V_p built on jₙ
//! (finite at the origin), their normalized versions u_p = U_p/C_p and
//! v_p = V_p/D_p, and the singular values σ_p of the Green operator
//! mapping currents in the source ball to fields on the surrounding sphere.
//!
//! Component expansion used throughout, with x = kr, f the radial function
//! (hₙ or jₙ), Y = Y_nm(θ,φ) and ∇Y its unit-sphere surface gradient:
//!
//! * l = 1 (transverse): f(x)·[(imY/sinθ) θ̂ − (∂θY) φ̂], i.e. −f·(r̂ × ∇Y);
//! * l = 2 (curl partner): [n(n+1)/x]·f(x)·Y r̂ + Dₙ(x)·∇Y, with the
//!   Riccati-derivative factor Dₙ(x) = (1/x)·d/dx[x f(x)] = f_{n−1}(x) − n f(x)/x.
//!
//! These satisfy ∇×(l=1 mode) = k·(l=2 mode) and vice versa, which the
//! finite-difference curl oracle in the test suite checks directly.

use crate::cvec3::CVec3;
use crate::error::{Error, Result};
use crate::geometry::{BallRule, SpherePoint, SurfaceRule};
use crate::specfun::{sph_bessel_j, sph_bessel_j_column, sph_hankel1, SphHarmonicTable};
use num_complex::Complex64;

/// Flattened spherical-mode label: degree n ≥ 1, azimuthal order |m| ≤ n,
/// polarization l ∈ {1, 2}, with p = 2(n(n+1)+m−1)+l a bijection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    n: u32,
    m: i32,
    l: u8,
}

impl ModeIndex {
    pub fn new(n: u32, m: i32, l: u8) -> Result<Self> {
        if n < 1 {
            return Err(Error::domain(format!("ModeIndex: n must be >= 1, got {n}")));
        }
        if m.unsigned_abs() > n {
            return Err(Error::domain(format!("ModeIndex: |m| = {} exceeds n = {n}", m.unsigned_abs())));
        }
        if l != 1 && l != 2 {
            return Err(Error::domain(format!("ModeIndex: l must be 1 or 2, got {l}")));
        }
        Ok(ModeIndex { n, m, l })
    }

    /// Inverse of the flattening: p odd ⇔ l = 1, then n = ⌊√(q+1)⌋ and
    /// m = q+1 − n(n+1) for q = (p − l)/2.
    pub fn from_p(p: usize) -> Result<Self> {
        if p < 1 {
            return Err(Error::domain("ModeIndex: p must be >= 1".to_string()));
        }
        let l = if p % 2 == 1 { 1u8 } else { 2u8 };
        let q = (p - l as usize) / 2;
        let t = q + 1;
        let mut n = (t as f64).sqrt().floor() as u64;
        // guard against rounding at perfect squares
        while (n + 1) * (n + 1) <= t as u64 {
            n += 1;
        }
        while n * n > t as u64 {
            n -= 1;
        }
        let m = t as i64 - (n * (n + 1)) as i64;
        Self::new(n as u32, m as i32, l)
    }

    pub fn p(&self) -> usize {
        let n = self.n as i64;
        let m = self.m as i64;
        (2 * (n * (n + 1) + m - 1) + self.l as i64) as usize
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> i32 {
        self.m
    }

    pub fn l(&self) -> u8 {
        self.l
    }

    /// Same (n, m), other polarization.
    pub fn partner(&self) -> ModeIndex {
        ModeIndex { n: self.n, m: self.m, l: 3 - self.l }
    }
}

/// Number of modes in full shells n = 1..=n_max: M = 2·n_max·(n_max + 2).
pub fn mode_count(n_max: u32) -> usize {
    (2 * n_max * (n_max + 2)) as usize
}

fn radial_pair_hankel(n: u32, x: f64) -> Result<(Complex64, Complex64)> {
    Ok((sph_hankel1(n, x)?, sph_hankel1(n - 1, x)?))
}

fn radial_pair_bessel(n: u32, x: f64) -> Result<(Complex64, Complex64)> {
    Ok((
        Complex64::new(sph_bessel_j(n, x)?, 0.0),
        Complex64::new(sph_bessel_j(n - 1, x)?, 0.0),
    ))
}

/// Assemble a mode field from its radial pair and angular factors.
/// `f_over_x` must be f(x)/x with the x → 0 limit taken for regular modes.
fn mode_field(
    mode: ModeIndex,
    f: Complex64,
    f_prev: Complex64,
    f_over_x: Complex64,
    y: Complex64,
    grad: &CVec3,
) -> CVec3 {
    let nn1 = (mode.n * (mode.n + 1)) as f64;
    match mode.l {
        1 => CVec3::new(Complex64::new(0.0, 0.0), f * grad.phi, -(f * grad.theta)),
        _ => {
            let d = f_prev - f_over_x * mode.n as f64;
            CVec3::new(f_over_x * nn1 * y, d * grad.theta, d * grad.phi)
        }
    }
}

/// Unnormalized fields of every mode p = 1..=2n_max(n_max+2) at one point,
/// given per-shell radial pairs (fₙ(x), fₙ₋₁(x)) indexed by n−1;
/// x = k·r > 0. Shares one harmonic table across all modes.
fn eval_all_modes(
    n_max: u32,
    radials: &[(Complex64, Complex64)],
    x: f64,
    table: &SphHarmonicTable,
    phi: f64,
) -> Vec<CVec3> {
    let mut out = Vec::with_capacity(mode_count(n_max));
    for n in 1..=n_max {
        let (f, f_prev) = radials[(n - 1) as usize];
        let f_over_x = f / x;
        for m in -(n as i32)..=n as i32 {
            let y = table.harmonic(n, m, phi);
            let grad = table.gradient(n, m, phi);
            for l in [1u8, 2] {
                let mode = ModeIndex { n, m, l };
                out.push(mode_field(mode, f, f_prev, f_over_x, y, &grad));
            }
        }
    }
    out
}

/// Radiating wavefunction U_p at radius r > 0 (hₙ⁽¹⁾ radial dependence).
pub fn eval_radiating(mode: ModeIndex, k: f64, r: f64, pt: &SpherePoint) -> Result<CVec3> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("eval_radiating: r must be > 0, got {r}")));
    }
    let x = k * r;
    let (f, f_prev) = radial_pair_hankel(mode.n, x)?;
    let table = SphHarmonicTable::new(mode.n, pt.theta);
    let y = table.harmonic(mode.n, mode.m, pt.phi);
    let grad = table.gradient(mode.n, mode.m, pt.phi);
    Ok(mode_field(mode, f, f_prev, f / x, y, &grad))
}

/// Regular wavefunction V_p at radius r ≥ 0 (jₙ radial dependence, finite
/// at the origin).
pub fn eval_regular(mode: ModeIndex, k: f64, r: f64, pt: &SpherePoint) -> Result<CVec3> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("eval_regular: r must be >= 0, got {r}")));
    }
    let x = k * r;
    let table = SphHarmonicTable::new(mode.n, pt.theta);
    let y = table.harmonic(mode.n, mode.m, pt.phi);
    let grad = table.gradient(mode.n, mode.m, pt.phi);
    if x == 0.0 {
        // jₙ(0) = δ_{n0}; jₙ(x)/x → 1/3 for n = 1, else 0.
        let f = Complex64::new(0.0, 0.0);
        let f_prev = Complex64::new(if mode.n == 1 { 1.0 } else { 0.0 }, 0.0);
        let f_over_x = Complex64::new(if mode.n == 1 { 1.0 / 3.0 } else { 0.0 }, 0.0);
        return Ok(mode_field(mode, f, f_prev, f_over_x, y, &grad));
    }
    let (f, f_prev) = radial_pair_bessel(mode.n, x)?;
    Ok(mode_field(mode, f, f_prev, f / x, y, &grad))
}

/// Surface norm C_p = √(∫_S |U_p|² dΩ) at radius r_s, by quadrature.
///
/// For l = 1 this equals √(n(n+1))·|hₙ(k r_s)| in closed form, which the
/// tests cross-check against this quadrature path.
pub fn norm_u_surface(mode: ModeIndex, k: f64, r_s: f64) -> Result<f64> {
    let rule = SurfaceRule::for_degree(mode.n + 2);
    norm_u_surface_with_rule(mode, k, r_s, &rule)
}

pub fn norm_u_surface_with_rule(
    mode: ModeIndex,
    k: f64,
    r_s: f64,
    rule: &SurfaceRule,
) -> Result<f64> {
    if !(r_s > 0.0) {
        return Err(Error::domain("norm_u_surface: r_s must be > 0".to_string()));
    }
    let mut err = None;
    let total = rule.integrate_real(|pt| match eval_radiating(mode, k, r_s, pt) {
        Ok(v) => v.norm_sqr(),
        Err(e) => {
            err = Some(e);
            0.0
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(total.sqrt()),
    }
}

/// Volume norm D_p = √(∫_V |V_p|² dr) over the ball of radius r_v.
pub fn norm_v_volume(mode: ModeIndex, k: f64, r_v: f64) -> Result<f64> {
    let radial_order = default_radial_order(mode.n, k * r_v);
    let rule = BallRule::new(mode.n + 2, radial_order, r_v)?;
    norm_v_volume_with_rule(mode, k, &rule)
}

/// Enough radial points that the oscillatory jₙ(kr) factor is resolved
/// with super-exponential margin.
pub fn default_radial_order(n_max: u32, k_r_v: f64) -> usize {
    (2 * n_max as usize + 2 * k_r_v.ceil() as usize + 24).max(24)
}

pub fn norm_v_volume_with_rule(mode: ModeIndex, k: f64, rule: &BallRule) -> Result<f64> {
    let mut err = None;
    let total = rule.integrate_real(|r, pt| match eval_regular(mode, k, r, pt) {
        Ok(v) => v.norm_sqr(),
        Err(e) => {
            err = Some(e);
            0.0
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(total.sqrt()),
    }
}

/// Singular value of the Green operator for mode p:
/// σ_p = C_p·D_p / (n(n+1)).
///
/// The 1/(n(n+1)) factor is the addition-theorem coefficient of the
/// unnormalized expansion with orthonormal harmonics; it is pinned
/// numerically by requiring the Poynting-flux power of a unit-excited mode
/// to match the closed-form transmit coefficient (see the power module
/// oracle tests, which agree to ~1e-12 with this convention).
pub fn singular_value(mode: ModeIndex, k: f64, r_s: f64, r_v: f64) -> Result<f64> {
    if !(r_s > r_v) {
        return Err(Error::domain(format!(
            "singular_value: need r_s > r_v, got r_s = {r_s}, r_v = {r_v}"
        )));
    }
    let c = norm_u_surface(mode, k, r_s)?;
    let d = norm_v_volume(mode, k, r_v)?;
    let nn1 = (mode.n * (mode.n + 1)) as f64;
    Ok(c * d / nn1)
}

/// Normalized radiating mode u_p = U_p / C_p with a precomputed norm.
pub fn eval_u(mode: ModeIndex, k: f64, r_s: f64, c_p: f64, pt: &SpherePoint) -> Result<CVec3> {
    Ok(eval_radiating(mode, k, r_s, pt)? * (1.0 / c_p))
}

/// Normalized regular mode v_p = V_p / D_p with a precomputed norm.
pub fn eval_v(mode: ModeIndex, k: f64, r: f64, d_p: f64, pt: &SpherePoint) -> Result<CVec3> {
    Ok(eval_regular(mode, k, r, pt)? * (1.0 / d_p))
}

/// One row of the per-mode table.
#[derive(Clone, Copy, Debug)]
pub struct ModeRow {
    pub mode: ModeIndex,
    /// Surface norm C_p of U_p on the sphere of radius r_s.
    pub c: f64,
    /// Volume norm D_p of V_p over the ball of radius r_v.
    pub d: f64,
    /// Green-operator singular value σ_p = C_p D_p / (n(n+1)).
    pub sigma: f64,
}

/// Precomputed norms and singular values for all modes with n ≤ n_max,
/// sharing quadrature rules and per-shell radial values. Immutable after
/// construction; cheap to share across threads.
#[derive(Clone, Debug)]
pub struct ModeTable {
    pub k: f64,
    pub r_s: f64,
    pub r_v: f64,
    pub n_max: u32,
    rows: Vec<ModeRow>,
    /// hₙ(k r_s) and hₙ₋₁(k r_s) per shell n = 1..=n_max (radius fixed on S).
    hankel_at_rs: Vec<(Complex64, Complex64)>,
}

impl ModeTable {
    pub fn build(k: f64, r_s: f64, r_v: f64, n_max: u32) -> Result<ModeTable> {
        if n_max < 1 {
            return Err(Error::domain("ModeTable: n_max must be >= 1".to_string()));
        }
        if !(k > 0.0) || !(r_v > 0.0) || !(r_s > r_v) {
            return Err(Error::config(format!(
                "ModeTable: need k > 0 and r_s > r_v > 0, got k = {k}, r_s = {r_s}, r_v = {r_v}"
            )));
        }
        let m = mode_count(n_max);
        let mut hankel_at_rs = Vec::with_capacity(n_max as usize);
        for n in 1..=n_max {
            hankel_at_rs.push(radial_pair_hankel(n, k * r_s)?);
        }

        // Shared rules with margin over the minimum exact degree; all norm
        // integrals batch over every mode per node.
        let surf = SurfaceRule::for_degree(2 * n_max + 4);
        let x_s = k * r_s;
        let mut c_sq = vec![0.0f64; m];
        for_each_theta_row(&surf, n_max, |table, phi, w| {
            for (p, field) in eval_all_modes(n_max, &hankel_at_rs, x_s, table, phi)
                .iter()
                .enumerate()
            {
                c_sq[p] += w * field.norm_sqr();
            }
        });

        let ball = BallRule::new(2 * n_max + 4, default_radial_order(n_max, k * r_v), r_v)?;
        let mut d_sq = vec![0.0f64; m];
        for (r, wr) in ball.radial_nodes.iter().zip(&ball.radial_weights) {
            let x = k * r;
            let col = sph_bessel_j_column(n_max, x)?;
            let radials: Vec<(Complex64, Complex64)> = (1..=n_max as usize)
                .map(|n| (Complex64::new(col[n], 0.0), Complex64::new(col[n - 1], 0.0)))
                .collect();
            for_each_theta_row(&ball.surface, n_max, |table, phi, ws| {
                for (p, field) in eval_all_modes(n_max, &radials, x, table, phi)
                    .iter()
                    .enumerate()
                {
                    d_sq[p] += wr * ws * field.norm_sqr();
                }
            });
        }

        let mut rows = Vec::with_capacity(m);
        for p in 1..=m {
            let mode = ModeIndex::from_p(p)?;
            let c = c_sq[p - 1].sqrt();
            let d = d_sq[p - 1].sqrt();
            let nn1 = (mode.n * (mode.n + 1)) as f64;
            rows.push(ModeRow { mode, c, d, sigma: c * d / nn1 });
        }
        Ok(ModeTable { k, r_s, r_v, n_max, rows, hankel_at_rs })
    }

    /// Per-shell (hₙ, hₙ₋₁) at k·r_s, indexed by n − 1.
    pub fn hankel_radials(&self) -> &[(Complex64, Complex64)] {
        &self.hankel_at_rs
    }

    /// Unnormalized U_p for every mode at a surface point.
    pub fn eval_radiating_all(&self, pt: &SpherePoint) -> Vec<CVec3> {
        let table = SphHarmonicTable::new(self.n_max, pt.theta);
        eval_all_modes(self.n_max, &self.hankel_at_rs, self.k * self.r_s, &table, pt.phi)
    }

    pub fn mode_count(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, p: usize) -> Result<&ModeRow> {
        self.rows
            .get(p - 1)
            .ok_or_else(|| Error::domain(format!("ModeTable: p = {p} out of range")))
    }

    pub fn rows(&self) -> &[ModeRow] {
        &self.rows
    }

    /// u_p at a point of the sphere r = r_s.
    pub fn eval_u(&self, p: usize, pt: &SpherePoint) -> Result<CVec3> {
        let row = *self.row(p)?;
        eval_u(row.mode, self.k, self.r_s, row.c, pt)
    }

    /// v_p at radius r ≤ r_v.
    pub fn eval_v(&self, p: usize, r: f64, pt: &SpherePoint) -> Result<CVec3> {
        let row = *self.row(p)?;
        eval_v(row.mode, self.k, r, row.d, pt)
    }

    /// All u_p at one surface point, sharing one harmonic table and the
    /// precomputed radial values; the workhorse of channel-matrix assembly.
    pub fn eval_u_all(&self, pt: &SpherePoint) -> Vec<CVec3> {
        let mut fields = self.eval_radiating_all(pt);
        for (field, row) in fields.iter_mut().zip(&self.rows) {
            *field = *field * (1.0 / row.c);
        }
        fields
    }
}

/// Drive a closure over a product rule's nodes, building each θ-row's
/// harmonic table once; calls f(table, φ, weight) per node.
fn for_each_theta_row(
    rule: &SurfaceRule,
    n_max: u32,
    mut f: impl FnMut(&SphHarmonicTable, f64, f64),
) {
    let n_phi = rule.n_phi();
    debug_assert_eq!(rule.nodes.len() % n_phi, 0);
    for chunk_start in (0..rule.nodes.len()).step_by(n_phi) {
        let theta = rule.nodes[chunk_start].theta;
        let table = SphHarmonicTable::new(n_max, theta);
        for i in chunk_start..chunk_start + n_phi {
            f(&table, rule.nodes[i].phi, rule.weights[i]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn mode_index_examples() {
        assert_eq!(ModeIndex::new(1, -1, 1).unwrap().p(), 1);
        assert_eq!(ModeIndex::new(1, 0, 2).unwrap().p(), 4);
        let m = ModeIndex::from_p(7).unwrap();
        assert_eq!((m.n(), m.m(), m.l()), (2, -2, 1));
    }

    #[test]
    fn mode_index_bijection_roundtrip() {
        for p in 1..=10_000usize {
            let m = ModeIndex::from_p(p).unwrap();
            assert_eq!(m.p(), p, "round-trip failed at p = {p}");
        }
    }

    #[test]
    fn mode_index_rejects_invalid() {
        assert!(ModeIndex::new(0, 0, 1).is_err());
        assert!(ModeIndex::new(2, 3, 1).is_err());
        assert!(ModeIndex::new(2, 0, 3).is_err());
        assert!(ModeIndex::from_p(0).is_err());
    }

    #[test]
    fn mode_count_closes_shells() {
        assert_eq!(mode_count(1), 6);
        assert_eq!(mode_count(3), 30);
        // max p in shell n_max is the count itself (contiguous range)
        assert_eq!(ModeIndex::new(3, 3, 2).unwrap().p(), mode_count(3));
    }

    #[test]
    fn transverse_mode_has_no_radial_component() {
        let mode = ModeIndex::from_p(1).unwrap();
        let pt = SpherePoint::new(FRAC_PI_2, 0.3);
        let v = eval_radiating(mode, 1.0, 2.0, &pt).unwrap();
        assert_eq!(v.r.norm(), 0.0);
    }

    #[test]
    fn radiating_rejects_origin() {
        let mode = ModeIndex::from_p(1).unwrap();
        assert!(eval_radiating(mode, 1.0, 0.0, &SpherePoint::new(1.0, 1.0)).is_err());
    }

    #[test]
    fn regular_vanishes_at_origin_like_kr() {
        let mode = ModeIndex::from_p(1).unwrap();
        let pt = SpherePoint::new(1.0, 0.5);
        let k = 1.0;
        let v1 = eval_regular(mode, k, 1e-3, &pt).unwrap();
        let v2 = eval_regular(mode, k, 2e-3, &pt).unwrap();
        assert!(v1.norm() > 0.0);
        // O(kr): doubling r doubles the field to leading order
        assert_relative_eq!(v2.norm() / v1.norm(), 2.0, max_relative = 1e-5);
        let v0 = eval_regular(mode, k, 0.0, &pt).unwrap();
        assert_eq!(v0.norm_sqr(), 0.0);
    }

    #[test]
    fn regular_real_for_m_zero() {
        let mode = ModeIndex::new(2, 0, 2).unwrap();
        let v = eval_regular(mode, 1.3, 0.7, &SpherePoint::new(1.1, 0.0)).unwrap();
        assert!(v.r.im.abs() < 1e-15);
        assert!(v.theta.im.abs() < 1e-15);
        assert!(v.phi.im.abs() < 1e-15);
    }

    #[test]
    fn far_field_radial_suppressed() {
        // l = 2 radial component ~ 1/(kr) relative to tangential far out.
        let mode = ModeIndex::from_p(2).unwrap(); // (1, -1, 2)
        let pt = SpherePoint::new(1.0, 0.8);
        let kr = 100.0;
        let v = eval_radiating(mode, 1.0, kr, &pt).unwrap();
        let tang = (v.theta.norm_sqr() + v.phi.norm_sqr()).sqrt();
        let ratio = v.r.norm() / tang;
        assert!(ratio < 3.0 / kr, "radial/tangential = {ratio}");
        assert!(ratio > 0.1 / kr);
    }

    #[test]
    fn surface_norm_closed_form_l1() {
        // C² = n(n+1)|hₙ(k r_s)|²; at k = r_s = 1, n = 1: |h₁(1)|² = 2 so C = 2.
        let mode = ModeIndex::from_p(1).unwrap();
        let c = norm_u_surface(mode, 1.0, 1.0).unwrap();
        assert_relative_eq!(c, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn volume_norm_positive_and_scales() {
        let mode = ModeIndex::from_p(1).unwrap();
        let k = 1.0;
        let d1 = norm_v_volume(mode, k, 1e-2).unwrap();
        let d2 = norm_v_volume(mode, k, 5e-3).unwrap();
        assert!(d1 > 0.0 && d2 > 0.0);
        // D ∝ (k r_v)^{5/2} at fixed k as k r_v → 0
        assert_relative_eq!(d1 / d2, 2f64.powf(2.5), max_relative = 1e-4);
    }

    #[test]
    fn singular_value_requires_rs_gt_rv() {
        let mode = ModeIndex::from_p(1).unwrap();
        assert!(singular_value(mode, 1.0, 1.0, 2.0).is_err());
        assert!(singular_value(mode, 1.0, 2.0, 1.0).unwrap() > 0.0);
    }

    #[test]
    fn table_eval_matches_direct_path() {
        let table = ModeTable::build(2.0, 3.0, 1.0, 2).unwrap();
        let pt = SpherePoint::new(0.9, 2.1);
        let all = table.eval_u_all(&pt);
        for p in 1..=table.mode_count() {
            let direct = table.eval_u(p, &pt).unwrap();
            assert!((all[p - 1] - direct).norm() < 1e-13 * (1.0 + direct.norm()));
        }
    }
}
