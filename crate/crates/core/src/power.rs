//! Per-mode transmit power coefficients T_p, radiation resistance
//! R_rad,p = T_p/R_V, and the complex-power (Poynting-flux) machinery that
//! serves as the independent oracle for the closed forms.
//!
//! Two independent routes to the radiated power of an excitation J:
//!
//! 1. closed form: Re{P} = Σ T_p |J_p|² with T_p from [`transmit_coeff`],
//!    a function of (n, l, kR_V) only — in particular independent of the
//!    observation radius R_S;
//! 2. quadrature: assemble E = −ηk² Σ σ_p J_p u_p on the sphere of radius
//!    R_S, form H = ik Σ σ_p J_p ∇×u_p from the exact curl relations
//!    ∇×u_{nm1} ∝ U_{nm2} and ∇×u_{nm2} ∝ U_{nm1} (no numerical
//!    differentiation), and integrate Re{½ E×H*·ds} ([`radiated_power_numeric`]).
//!
//! The η-dependence of route 2 is exposed so a fault-injection hook can
//! corrupt one copy of the constant and verify the comparison catches it.

use crate::cvec3::CVec3;
use crate::error::{Error, Result};
use crate::geometry::SurfaceRule;
use crate::specfun::{sph_bessel_j, sph_hankel1, sph_hankel1_logderiv};
use crate::wavefunctions::{eval_radiating, ModeIndex, ModeTable};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Free-space wave impedance, fixed exactly at 120π Ohm.
pub const ETA_OHM: f64 = 120.0 * PI;

/// jₙ(x) extended to n = −1 by j₋₁(x) = cos(x)/x.
fn jn_ext(n: i64, x: f64) -> Result<f64> {
    if n == -1 {
        if !(x > 0.0) {
            return Err(Error::domain("jn_ext: x must be > 0 for n = -1".to_string()));
        }
        Ok(x.cos() / x)
    } else {
        sph_bessel_j(n as u32, x)
    }
}

/// jₙ₋₁² + jₙ² − ((2n+1)/x)·jₙ₋₁·jₙ at x; equals (2/R³)∫₀ᴿ jₙ²(kr) r² dr
/// for x = kR.
fn radial_bracket(n: i64, x: f64) -> Result<f64> {
    let jm = jn_ext(n - 1, x)?;
    let j = jn_ext(n, x)?;
    Ok(jm * jm + j * j - (2 * n + 1) as f64 / x * jm * j)
}

/// Transmit power per unit |J_p|² for mode p [Ohm·m]:
///
/// * l = 1: ηk²R_V³/4 · [jₙ₋₁² + jₙ² − ((2n+1)/kR_V) jₙ₋₁jₙ](kR_V);
/// * l = 2: the (n±1)-bracket combination weighted (n+1)/(2n+1) and n/(2n+1).
///
/// Depends only on (n, l, kR_V) — no m, no R_S.
pub fn transmit_coeff(mode: ModeIndex, k: f64, r_v: f64) -> Result<f64> {
    if !(k > 0.0) || !(r_v > 0.0) {
        return Err(Error::domain(format!(
            "transmit_coeff: need k > 0 and r_v > 0, got k = {k}, r_v = {r_v}"
        )));
    }
    let x = k * r_v;
    let n = mode.n() as i64;
    let prefactor = ETA_OHM * k * k * r_v.powi(3) / 4.0;
    let bracket = if mode.l() == 1 {
        radial_bracket(n, x)?
    } else {
        let w_lo = (n + 1) as f64 / (2 * n + 1) as f64;
        let w_hi = n as f64 / (2 * n + 1) as f64;
        w_lo * radial_bracket(n - 1, x)? + w_hi * radial_bracket(n + 1, x)?
    };
    Ok(prefactor * bracket)
}

/// Radiation resistance R_rad,p = T_p / R_V [Ohm]; a function of kR_V only.
pub fn radiation_resistance(mode: ModeIndex, k: f64, r_v: f64) -> Result<f64> {
    Ok(transmit_coeff(mode, k, r_v)? / r_v)
}

/// Radiated power of mode p with excitation J_p: T_p·|J_p|² =
/// R_rad,p·|J_p|²·R_V [W].
pub fn mode_power(mode: ModeIndex, j_p: Complex64, k: f64, r_v: f64) -> Result<f64> {
    Ok(transmit_coeff(mode, k, r_v)? * j_p.norm_sqr())
}

/// Closed form of γ_pp′ = ∮_S u_p × (∇×u_{p′})* · ds:
///
/// * l = l′ = 1, p = p′: R_S + R_S²·(k·hₙ′/hₙ)*;
/// * l = l′ = 2, p = p′: −(C²_{nm1}/C_p²)·(R_S + R_S²·k·hₙ′/hₙ);
/// * all other index pairs: 0.
///
/// Both C² values have closed forms here (no quadrature), keeping this
/// route independent of [`gamma_quadrature`].
pub fn gamma_closed(p: ModeIndex, p2: ModeIndex, k: f64, r_s: f64) -> Result<Complex64> {
    if !(k > 0.0) || !(r_s > 0.0) {
        return Err(Error::domain("gamma_closed: need k > 0 and r_s > 0".to_string()));
    }
    let zero = Complex64::new(0.0, 0.0);
    if p.l() != p2.l() || p.n() != p2.n() || p.m() != p2.m() {
        return Ok(zero);
    }
    let n = p.n();
    let x = k * r_s;
    let logderiv_r = sph_hankel1_logderiv(n, x)? * k; // d/dr at r = R_S
    let base = Complex64::new(r_s, 0.0) + logderiv_r * (r_s * r_s);
    if p.l() == 1 {
        Ok(base.conj())
    } else {
        let h = sph_hankel1(n, x)?;
        let h_prev = sph_hankel1(n - 1, x)?;
        let nn1 = (n * (n + 1)) as f64;
        let c1_sq = nn1 * h.norm_sqr();
        let d = h_prev - h * (n as f64 / x);
        let c2_sq = (nn1 / x).powi(2) * h.norm_sqr() + nn1 * d.norm_sqr();
        Ok(-(c1_sq / c2_sq) * base)
    }
}

/// γ_pp′ by direct surface quadrature of u_p × (∇×u_{p′})* · r̂ R_S² over
/// the sphere, with norms taken from quadrature as well.
pub fn gamma_quadrature(p: ModeIndex, p2: ModeIndex, k: f64, r_s: f64) -> Result<Complex64> {
    if !(k > 0.0) || !(r_s > 0.0) {
        return Err(Error::domain("gamma_quadrature: need k > 0 and r_s > 0".to_string()));
    }
    let n_hi = p.n().max(p2.n());
    let rule = SurfaceRule::for_degree(n_hi + 2);
    let c_p = crate::wavefunctions::norm_u_surface_with_rule(p, k, r_s, &rule)?;
    let c_p2 = crate::wavefunctions::norm_u_surface_with_rule(p2, k, r_s, &rule)?;
    let mut err = None;
    let total = rule.integrate(|pt| {
        let u = match eval_radiating(p, k, r_s, pt) {
            Ok(v) => v * (1.0 / c_p),
            Err(e) => {
                err = Some(e);
                return Complex64::new(0.0, 0.0);
            }
        };
        // ∇×u_{p′} = (k/C_{p′}) U_{partner(p′)}
        let curl = match eval_radiating(p2.partner(), k, r_s, pt) {
            Ok(v) => v * (k / c_p2),
            Err(e) => {
                err = Some(e);
                return Complex64::new(0.0, 0.0);
            }
        };
        u.cross_radial(&curl.conj()) * (r_s * r_s)
    });
    match err {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// Radiated power Re{P_c} of a mode excitation vector (J_1, …, J_M) by
/// Poynting-flux quadrature over the sphere of radius r_s; the independent
/// oracle for [`transmit_coeff`].
///
/// `order` overrides the surface-rule degree; it must cover the highest
/// excited shell or the call is rejected.
pub fn radiated_power_numeric(
    excitation: &[Complex64],
    k: f64,
    r_s: f64,
    r_v: f64,
    order: Option<u32>,
) -> Result<f64> {
    radiated_power_numeric_with_eta(excitation, k, r_s, r_v, order, ETA_OHM)
}

/// Same as [`radiated_power_numeric`] with an explicit wave impedance for
/// the E-field assembly; the fault-injection entry point used by the
/// validation report.
pub fn radiated_power_numeric_with_eta(
    excitation: &[Complex64],
    k: f64,
    r_s: f64,
    r_v: f64,
    order: Option<u32>,
    eta_field: f64,
) -> Result<f64> {
    if excitation.is_empty() || excitation.iter().all(|j| j.norm_sqr() == 0.0) {
        return Ok(0.0);
    }
    let n_max = ModeIndex::from_p(excitation.len())?.n();
    let table = ModeTable::build(k, r_s, r_v, n_max)?;
    radiated_power_with_table(&table, excitation, order, eta_field)
}

/// Poynting-flux power with a prebuilt mode table (shared across many
/// excitations of the same geometry).
pub fn radiated_power_with_table(
    table: &ModeTable,
    excitation: &[Complex64],
    order: Option<u32>,
    eta_field: f64,
) -> Result<f64> {
    if excitation.is_empty() || excitation.iter().all(|j| j.norm_sqr() == 0.0) {
        return Ok(0.0);
    }
    if excitation.len() > table.mode_count() {
        return Err(Error::dimension(format!(
            "radiated_power: excitation has {} entries but the table holds {} modes",
            excitation.len(),
            table.mode_count()
        )));
    }
    let n_max = ModeIndex::from_p(excitation.len())?.n();
    let degree = match order {
        Some(o) => {
            if o < n_max {
                return Err(Error::domain(format!(
                    "radiated_power: quadrature degree {o} too low for n_max = {n_max}"
                )));
            }
            o
        }
        None => n_max + 2,
    };
    let k = table.k;
    let r_s = table.r_s;
    let rule = SurfaceRule::for_degree(degree);
    // Per-mode weights: E gets (−ηk² σ_p J_p / C_p)·U_p, H gets
    // (ik·k σ_p J_p / C_p)·U_{partner(p)} from ∇×u_p = (k/C_p)U_partner.
    let mut e_weight = vec![Complex64::new(0.0, 0.0); table.mode_count()];
    let mut h_weight = vec![Complex64::new(0.0, 0.0); table.mode_count()];
    for (i, j_p) in excitation.iter().enumerate() {
        if j_p.norm_sqr() == 0.0 {
            continue;
        }
        let row = table.row(i + 1)?;
        let coeff = j_p * row.sigma / row.c;
        e_weight[i] += coeff * (-eta_field * k * k);
        h_weight[row.mode.partner().p() - 1] += coeff * Complex64::new(0.0, k * k);
    }
    let p_c = rule.integrate(|pt| {
        let fields = table.eval_radiating_all(pt);
        let mut e_field = CVec3::ZERO;
        let mut h_field = CVec3::ZERO;
        for (i, f) in fields.iter().enumerate() {
            if e_weight[i].norm_sqr() > 0.0 {
                e_field = e_field + *f * e_weight[i];
            }
            if h_weight[i].norm_sqr() > 0.0 {
                h_field = h_field + *f * h_weight[i];
            }
        }
        // ½ (E × H*)·r̂ R_S²
        e_field.cross_radial(&h_field.conj()) * (0.5 * r_s * r_s)
    });
    Ok(p_c.re)
}
