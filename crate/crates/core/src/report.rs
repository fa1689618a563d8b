//! Plot-ready CSV writers and the machine-readable validation report run by
//! the `validate` command: Wronskians, orthonormality, the closed-form vs
//! Poynting-oracle power comparison, τ asymptotics and the received-power
//! ratio, each with its measured residual and pinned tolerance.

use crate::capacity::{capacity_limit, closed_form_rate, log_abs_det};
use crate::channel::{assemble, gram_defect, PhysicalConfig};
use crate::dof::DofCurve;
use crate::error::Result;
use crate::geometry::SurfaceRule;
use crate::power::{radiated_power_with_table, transmit_coeff, ETA_OHM};
use crate::specfun::{sph_bessel_j, sph_bessel_y, sph_hankel1, sph_hankel1_logderiv, SphHarmonicTable};
use crate::wavefunctions::{ModeIndex, ModeTable};
use crate::capacity::ConvergenceRow;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// One validation check with its measured residual.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    fn new(name: &str, residual: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.to_string(),
            passed: residual.is_finite() && residual <= tolerance,
            residual,
            tolerance,
            detail: None,
        }
    }

    fn with_detail(mut self, detail: String) -> Self {
        self.detail = Some(detail);
        self
    }
}

/// Pass/fail report over the invariant suite.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub eta_ohm: f64,
    pub all_passed: bool,
    pub checks: Vec<CheckResult>,
    pub notes: Vec<String>,
}

/// Standing notes attached to every report and manifest.
pub fn standing_notes() -> Vec<String> {
    vec![
        "wave impedance fixed at eta = 120*pi Ohm exactly".to_string(),
        "hankel log-derivative identity applied in the dimensionless argument: Im{h_n'(x)/h_n(x)} = 1/(x^2 |h_n(x)|^2); closed-form mode powers are cross-validated against the Poynting-flux quadrature rather than any printed intermediate".to_string(),
        "singular values use sigma_p = C_p D_p / (n(n+1)), the normalization under which the Poynting oracle reproduces the closed-form transmit coefficients".to_string(),
    ]
}

/// Run the full invariant suite at the given configuration.
///
/// `eta_injection_scale` multiplies the wave impedance used by the
/// Poynting-oracle field assembly only; 1.0 is the honest run, anything
/// else is fault injection that the closed-form comparison must catch.
pub fn run_validation(config: &PhysicalConfig, eta_injection_scale: f64) -> Result<ValidationReport> {
    config.validate()?;
    let mut checks = Vec::new();

    checks.push(check_wronskian());
    checks.push(check_recurrence());
    checks.push(check_hankel_im_identity());
    checks.push(check_orthonormality(12));
    checks.push(check_gradient_eigenvalue(12));
    checks.push(check_prop1_vs_poynting(config, eta_injection_scale));
    checks.push(check_tau_asymptotics(config)?);
    checks.push(check_gamma_structure(config)?);
    checks.push(check_remark2_ratio(config)?);
    checks.push(check_gram_defect(config)?);
    checks.push(check_capacity_closed_form(config));
    checks.push(check_determinant_identity(config.seed));

    let all_passed = checks.iter().all(|c| c.passed);
    Ok(ValidationReport { eta_ohm: ETA_OHM, all_passed, checks, notes: standing_notes() })
}

fn check_wronskian() -> CheckResult {
    // x²(jₙ yₙ′ − jₙ′ yₙ) = 1 with f′ = f_{n−1} − (n+1)/x f.
    let xs = [0.1, 0.5, 1.0, 3.0, 10.0, 50.0, 100.0, 250.0, 500.0];
    let mut worst = 0.0f64;
    for n in (0..=100u32).step_by(5) {
        for &x in &xs {
            let j = sph_bessel_j(n, x).unwrap();
            let y = sph_bessel_y(n, x).unwrap();
            let (jm, ym) = if n == 0 {
                (x.cos() / x, x.sin() / x) // j₋₁, y₋₁
            } else {
                (sph_bessel_j(n - 1, x).unwrap(), sph_bessel_y(n - 1, x).unwrap())
            };
            let fac = (n + 1) as f64 / x;
            let jp = jm - fac * j;
            let yp = ym - fac * y;
            if !(j.is_finite() && y.is_finite() && jp.is_finite() && yp.is_finite()) {
                continue; // beyond f64 range (deep evanescent)
            }
            let w = x * x * (j * yp - jp * y);
            worst = worst.max((w - 1.0).abs());
        }
    }
    CheckResult::new("bessel_wronskian", worst, 1e-10)
}

fn check_recurrence() -> CheckResult {
    // j_{n−1} + j_{n+1} = ((2n+1)/x) jₙ, relative, where |jₙ| > 1e-280.
    let xs = [0.2, 1.0, 4.5, 20.0, 137.0, 480.0];
    let mut worst = 0.0f64;
    for n in 1..=100u32 {
        for &x in &xs {
            let jm = sph_bessel_j(n - 1, x).unwrap();
            let j = sph_bessel_j(n, x).unwrap();
            let jp = sph_bessel_j(n + 1, x).unwrap();
            if j.abs() <= 1e-280 {
                continue;
            }
            let lhs = jm + jp;
            let rhs = (2 * n + 1) as f64 / x * j;
            let scale = lhs.abs().max(rhs.abs()).max(1e-300);
            worst = worst.max((lhs - rhs).abs() / scale);
        }
    }
    CheckResult::new("bessel_recurrence", worst, 1e-10)
}

fn check_hankel_im_identity() -> CheckResult {
    // Im{hₙ′(x)/hₙ(x)}·x²|hₙ(x)|² = 1 wherever |hₙ|² is representable.
    let xs = [0.5, 1.0, 2.0, 5.0, 20.0, 75.0, 200.0, 500.0];
    let mut worst = 0.0f64;
    for n in 0..=100u32 {
        for &x in &xs {
            let h = sph_hankel1(n, x).unwrap();
            let h2 = h.norm_sqr();
            if !h2.is_finite() || h2 > 1e280 {
                continue;
            }
            let ld = sph_hankel1_logderiv(n, x).unwrap();
            worst = worst.max((ld.im * x * x * h2 - 1.0).abs());
        }
    }
    CheckResult::new("hankel_im_identity", worst, 1e-10)
}

/// Max |Gram − I| over scalar harmonics with n ≤ n_max under the product
/// quadrature rule.
pub fn harmonic_gram_defect(n_max: u32) -> f64 {
    let rule = SurfaceRule::for_degree(n_max);
    let modes: Vec<(u32, i32)> = (0..=n_max)
        .flat_map(|n| (-(n as i32)..=n as i32).map(move |m| (n, m)))
        .collect();
    let vals: Vec<Vec<Complex64>> = rule
        .nodes
        .iter()
        .map(|pt| {
            let t = SphHarmonicTable::new(n_max, pt.theta);
            modes.iter().map(|&(n, m)| t.harmonic(n, m, pt.phi)).collect()
        })
        .collect();
    let mut worst = 0.0f64;
    for (a, &(na, ma)) in modes.iter().enumerate() {
        for (b, &(nb, mb)) in modes.iter().enumerate().skip(a) {
            let mut acc = Complex64::new(0.0, 0.0);
            for (row, w) in vals.iter().zip(&rule.weights) {
                acc += row[a].conj() * row[b] * *w;
            }
            let expect = if na == nb && ma == mb { 1.0 } else { 0.0 };
            worst = worst.max((acc - Complex64::new(expect, 0.0)).norm());
        }
    }
    worst
}

fn check_orthonormality(n_max: u32) -> CheckResult {
    CheckResult::new("harmonic_orthonormality", harmonic_gram_defect(n_max), 1e-10)
}

/// Max |∫|∇Y_nm|²dΩ − n(n+1)| over 1 ≤ n ≤ n_max.
pub fn gradient_eigenvalue_defect(n_max: u32) -> f64 {
    let rule = SurfaceRule::for_degree(n_max);
    let mut worst = 0.0f64;
    for n in 1..=n_max {
        for m in -(n as i32)..=n as i32 {
            let integral = rule.integrate_real(|pt| {
                SphHarmonicTable::new(n, pt.theta).gradient(n, m, pt.phi).norm_sqr()
            });
            worst = worst.max((integral - (n * (n + 1)) as f64).abs());
        }
    }
    worst
}

fn check_gradient_eigenvalue(n_max: u32) -> CheckResult {
    CheckResult::new("gradient_eigenvalue_identity", gradient_eigenvalue_defect(n_max), 1e-10)
}

/// Worst relative disagreement between the closed-form transmit
/// coefficients and the Poynting oracle over single-mode excitations with
/// n ≤ n_max, at each ratio r_s/r_v in `rs_factors`.
pub fn prop1_oracle_residual(
    k: f64,
    r_v: f64,
    rs_factors: &[f64],
    n_max: u32,
    eta_scale: f64,
) -> Result<f64> {
    let m = crate::wavefunctions::mode_count(n_max);
    let mut worst = 0.0f64;
    for &fac in rs_factors {
        let r_s = fac * r_v;
        let table = ModeTable::build(k, r_s, r_v, n_max)?;
        for p in 1..=m {
            let mode = ModeIndex::from_p(p)?;
            let t_closed = transmit_coeff(mode, k, r_v)?;
            let mut j = vec![Complex64::new(0.0, 0.0); p];
            j[p - 1] = Complex64::new(1.0, 0.0);
            let t_oracle = radiated_power_with_table(&table, &j, None, ETA_OHM * eta_scale)?;
            worst = worst.max(((t_oracle - t_closed) / t_closed).abs());
        }
    }
    Ok(worst)
}

fn check_prop1_vs_poynting(config: &PhysicalConfig, eta_scale: f64) -> CheckResult {
    match prop1_oracle_residual(config.k, config.r_v, &[2.0, 5.0, 10.0], 3, eta_scale) {
        Ok(worst) => CheckResult::new("prop1_vs_poynting_oracle", worst, 1e-6)
            .with_detail(format!("n <= 3, r_s/r_v in {{2, 5, 10}}, eta scale {eta_scale}")),
        Err(e) => CheckResult::new("prop1_vs_poynting_oracle", f64::INFINITY, 1e-6)
            .with_detail(e.to_string()),
    }
}

/// Max |ηk⁴R_S²σ_p²/(2T_p) − 1| over modes with n ≤ n_max at the given kR_S.
pub fn tau_ratio_deviation(k: f64, r_v: f64, k_r_s: f64, n_max: u32) -> Result<f64> {
    let r_s = k_r_s / k;
    let table = ModeTable::build(k, r_s, r_v, n_max)?;
    let mut worst = 0.0f64;
    for row in table.rows() {
        let t = transmit_coeff(row.mode, k, r_v)?;
        let ratio = ETA_OHM * k.powi(4) * r_s * r_s * row.sigma * row.sigma / (2.0 * t);
        worst = worst.max((ratio - 1.0).abs());
    }
    Ok(worst)
}

fn check_tau_asymptotics(config: &PhysicalConfig) -> Result<CheckResult> {
    let d100 = tau_ratio_deviation(config.k, config.r_v, 100.0, 3)?;
    let d200 = tau_ratio_deviation(config.k, config.r_v, 200.0, 3)?;
    let factor = d200 / d100;
    Ok(CheckResult::new("tau_asymptotic_decay", factor, 0.6)
        .with_detail(format!("deviation {d100:.3e} at kR_S = 100, {d200:.3e} at kR_S = 200")))
}

fn check_gamma_structure(config: &PhysicalConfig) -> Result<CheckResult> {
    // Structure at desk scale: off-diagonal and cross-l entries vanish,
    // diagonal matches the closed form.
    let k = 1.0;
    let r_s = 2.0;
    let modes: Vec<ModeIndex> = (1..=16).map(|p| ModeIndex::from_p(p).unwrap()).collect();
    let mut worst_off = 0.0f64;
    let mut worst_diag = 0.0f64;
    for a in &modes {
        for b in &modes {
            let q = crate::power::gamma_quadrature(*a, *b, k, r_s)?;
            if a == b {
                let c = crate::power::gamma_closed(*a, *b, k, r_s)?;
                worst_diag = worst_diag.max((q - c).norm() / c.norm());
            } else {
                worst_off = worst_off.max(q.norm());
            }
        }
    }
    let _ = config;
    let residual = worst_off.max(worst_diag * 1e-2); // diag tol 1e-8, off tol 1e-10
    Ok(CheckResult::new("gamma_structure", residual, 1e-10).with_detail(format!(
        "max |gamma| off-structure {worst_off:.3e} (tol 1e-10), diag closed-vs-quadrature rel {worst_diag:.3e} (tol 1e-8)"
    )))
}

fn check_remark2_ratio(config: &PhysicalConfig) -> Result<CheckResult> {
    let ch = assemble(config)?;
    let ratio = ch.matrices.received_power_ratio();
    let alpha = ch.alpha_eff();
    Ok(CheckResult::new("remark2_received_power_ratio", (ratio - alpha).abs() / alpha, 0.05)
        .with_detail(format!("ratio {ratio:.6} vs alpha_eff {alpha:.6} at N = {}", ch.dipoles.len())))
}

fn check_gram_defect(config: &PhysicalConfig) -> Result<CheckResult> {
    let ch = assemble(config)?;
    let (off, diag) = gram_defect(&ch.matrices.gram_phi_scaled());
    Ok(CheckResult::new("phi_gram_identity", off.max(diag), 0.05)
        .with_detail(format!("N = {}, M = {}", ch.dipoles.len(), ch.matrices.n_modes())))
}

fn check_capacity_closed_form(config: &PhysicalConfig) -> CheckResult {
    let alpha = config.alpha;
    let p = config.power_w;
    let n_w = config.noise_power();
    let w = config.bandwidth_hz;
    let limit = capacity_limit(alpha, p, config.n0_w_per_hz);
    let gap = (limit - closed_form_rate(1000, w, alpha, p, n_w)).abs() / limit;
    CheckResult::new("closed_form_vs_limit_m1000", gap, 1e-3)
}

fn check_determinant_identity(seed: u64) -> CheckResult {
    // |I_N + AB| = |I_M + BA| on a random complex instance.
    let (n, m) = (200usize, 20usize);
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0xdecade);
    let scale = 1.0 / (m as f64).sqrt();
    let a = DMatrix::from_fn(n, m, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * scale
    });
    let b = DMatrix::from_fn(m, n, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * scale
    });
    let big = DMatrix::identity(n, n) + &a * &b;
    let small = DMatrix::identity(m, m) + &b * &a;
    let ld_big = log_abs_det(&big);
    let ld_small = log_abs_det(&small);
    let rel = (ld_big - ld_small).abs() / ld_small.abs().max(1e-300);
    CheckResult::new("determinant_identity", rel, 1e-8)
        .with_detail(format!("log|det|: {ld_big:.12} vs {ld_small:.12}"))
}

// ---------------------------------------------------------------------------
// CSV writers (numeric columns use Rust's shortest round-trip formatting,
// so identical inputs give byte-identical files)
// ---------------------------------------------------------------------------

/// `p,n,m,l,C_p,D_p,sigma_p,T_p,R_rad_p`
pub fn write_mode_table_csv<W: Write>(mut w: W, table: &ModeTable, k: f64, r_v: f64) -> Result<()> {
    writeln!(w, "p,n,m,l,C_p,D_p,sigma_p,T_p,R_rad_p")?;
    for row in table.rows() {
        let t = transmit_coeff(row.mode, k, r_v)?;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            row.mode.p(),
            row.mode.n(),
            row.mode.m(),
            row.mode.l(),
            row.c,
            row.d,
            row.sigma,
            t,
            t / r_v
        )?;
    }
    Ok(())
}

/// `p,n,m,l,T_p,R_rad_ohm` (plot-ready radiation-resistance table).
pub fn write_rad_resistance_csv<W: Write>(mut w: W, k: f64, r_v: f64, n_max: u32) -> Result<()> {
    writeln!(w, "p,n,m,l,T_p,R_rad_ohm")?;
    for p in 1..=crate::wavefunctions::mode_count(n_max) {
        let mode = ModeIndex::from_p(p)?;
        let t = transmit_coeff(mode, k, r_v)?;
        writeln!(
            w,
            "{},{},{},{},{},{}",
            p,
            mode.n(),
            mode.m(),
            mode.l(),
            t,
            t / r_v
        )?;
    }
    Ok(())
}

/// One row of the Gram-defect table.
#[derive(Clone, Copy, Debug)]
pub struct OrthoRow {
    pub n: usize,
    pub m: usize,
    pub max_offdiag: f64,
    pub max_diag_err: f64,
}

/// `N,M,max_offdiag,max_diag_err`
pub fn write_ortho_csv<W: Write>(mut w: W, rows: &[OrthoRow]) -> Result<()> {
    writeln!(w, "N,M,max_offdiag,max_diag_err")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.n, r.m, r.max_offdiag, r.max_diag_err)?;
    }
    Ok(())
}

/// `M,N,rate_finite,rate_closed_form,rate_limit,ratio_to_limit`
pub fn write_capacity_csv<W: Write>(mut w: W, rows: &[ConvergenceRow]) -> Result<()> {
    writeln!(w, "M,N,rate_finite,rate_closed_form,rate_limit,ratio_to_limit")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.m,
            r.n,
            r.rate_finite,
            r.rate_closed_form,
            r.rate_limit,
            r.ratio_to_limit()
        )?;
    }
    Ok(())
}

/// `r_v_over_lambda,threshold_ohm,dof`
pub fn write_dof_csv<W: Write>(mut w: W, curve: &DofCurve) -> Result<()> {
    writeln!(w, "r_v_over_lambda,threshold_ohm,dof")?;
    for p in &curve.points {
        writeln!(w, "{},{},{}", p.r_v_over_lambda, p.threshold_ohm, p.count)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_headers_match_schemas() {
        let mut buf = Vec::new();
        write_ortho_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().next().unwrap(), "N,M,max_offdiag,max_diag_err");
        let mut buf = Vec::new();
        write_capacity_csv(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap().lines().next().unwrap(),
            "M,N,rate_finite,rate_closed_form,rate_limit,ratio_to_limit"
        );
    }

    #[test]
    fn rad_resistance_csv_row_count() {
        // n_max = 1: exactly 6 rows (3 m-values × 2 l-values) plus header.
        let mut buf = Vec::new();
        write_rad_resistance_csv(&mut buf, 4.0 * std::f64::consts::PI, 1.0, 1).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 7);
        assert_eq!(text.lines().next().unwrap(), "p,n,m,l,T_p,R_rad_ohm");
    }

    #[test]
    fn small_check_results_behave() {
        let ok = CheckResult::new("x", 1e-12, 1e-10);
        assert!(ok.passed);
        let bad = CheckResult::new("x", 1e-9, 1e-10);
        assert!(!bad.passed);
        let nan = CheckResult::new("x", f64::NAN, 1e-10);
        assert!(!nan.passed);
    }
}
