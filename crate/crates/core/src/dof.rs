//! Threshold-based degrees-of-freedom counting: the number of modes whose
//! radiation resistance meets or exceeds a threshold, and its scaling with
//! the surface area of the source region in wavelengths squared.
//!
//! Conventions (fixed here once): the comparison is ≥, and both
//! polarizations l = 1, 2 are counted together. A positive threshold always
//! yields a finite count because R_rad → 0 super-exponentially once
//! n ≳ kR_V; a non-positive threshold is rejected (the mode set is infinite).

use crate::error::{Error, Result};
use crate::power::radiation_resistance;
use crate::wavefunctions::ModeIndex;
use std::f64::consts::PI;

/// Number of (n, m, l) modes with R_rad,p ≥ threshold at the given kR_V.
///
/// `n_cap` is a starting scan bound; the scan auto-extends past it until
/// two consecutive shells contribute nothing, so the count is exact for any
/// positive threshold.
pub fn dof_count(k_r_v: f64, threshold_ohm: f64, n_cap: u32) -> Result<u64> {
    if !(k_r_v > 0.0) || !k_r_v.is_finite() {
        return Err(Error::domain(format!("dof_count: kR_V must be > 0, got {k_r_v}")));
    }
    if !(threshold_ohm > 0.0) {
        return Err(Error::domain(format!(
            "dof_count: threshold must be > 0 (got {threshold_ohm}); at zero threshold the count diverges"
        )));
    }
    // R_rad depends only on kR_V; realize it with k = kR_V, R_V = 1.
    let k = k_r_v;
    let r_v = 1.0;
    let mut count = 0u64;
    let mut empty_streak = 0u32;
    let mut n = 1u32;
    loop {
        let mut shell = 0u64;
        for l in [1u8, 2] {
            let mode = ModeIndex::new(n, 0, l)?;
            if radiation_resistance(mode, k, r_v)? >= threshold_ohm {
                shell += (2 * n + 1) as u64; // m-degenerate block
            }
        }
        count += shell;
        empty_streak = if shell == 0 { empty_streak + 1 } else { 0 };
        if n >= n_cap && empty_streak >= 2 {
            break;
        }
        n += 1;
        if n > 100_000 {
            return Err(Error::domain(
                "dof_count: shell scan did not terminate (threshold too small?)".to_string(),
            ));
        }
    }
    Ok(count)
}

/// One grid point of a DoF sweep.
#[derive(Clone, Copy, Debug)]
pub struct DofPoint {
    pub r_v_over_lambda: f64,
    pub threshold_ohm: f64,
    pub count: u64,
}

/// Linear fit of count against (R_V/λ)² for one threshold.
#[derive(Clone, Copy, Debug)]
pub struct DofFit {
    pub threshold_ohm: f64,
    /// Slope of count per unit (R_V/λ)².
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Full DoF grid with per-threshold area-scaling fits.
#[derive(Clone, Debug)]
pub struct DofCurve {
    pub points: Vec<DofPoint>,
    pub fits: Vec<DofFit>,
}

impl DofCurve {
    /// Counts for one threshold in the grid's R_V order.
    pub fn counts_at(&self, threshold_ohm: f64) -> Vec<u64> {
        self.points
            .iter()
            .filter(|p| p.threshold_ohm == threshold_ohm)
            .map(|p| p.count)
            .collect()
    }
}

/// Sweep DoF counts over source radii (as R_V/λ) and thresholds, enforcing
/// the monotonicity invariants: nonincreasing in threshold at fixed R_V,
/// nondecreasing in R_V at fixed threshold.
pub fn dof_sweep(r_v_over_lambda: &[f64], thresholds_ohm: &[f64]) -> Result<DofCurve> {
    if r_v_over_lambda.is_empty() || thresholds_ohm.is_empty() {
        return Err(Error::domain("dof_sweep: grids must be nonempty".to_string()));
    }
    if r_v_over_lambda.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::domain("dof_sweep: all radii must be > 0".to_string()));
    }
    let mut points = Vec::with_capacity(r_v_over_lambda.len() * thresholds_ohm.len());
    for &rol in r_v_over_lambda {
        let k_r_v = 2.0 * PI * rol;
        for &thr in thresholds_ohm {
            let n_cap = (k_r_v.ceil() as u32 + 8).max(8);
            let count = dof_count(k_r_v, thr, n_cap)?;
            points.push(DofPoint { r_v_over_lambda: rol, threshold_ohm: thr, count });
        }
    }
    check_monotonicity(&points, r_v_over_lambda, thresholds_ohm)?;
    let mut fits = Vec::with_capacity(thresholds_ohm.len());
    for &thr in thresholds_ohm {
        let xs: Vec<f64> = points
            .iter()
            .filter(|p| p.threshold_ohm == thr)
            .map(|p| p.r_v_over_lambda * p.r_v_over_lambda)
            .collect();
        let ys: Vec<f64> = points
            .iter()
            .filter(|p| p.threshold_ohm == thr)
            .map(|p| p.count as f64)
            .collect();
        let (slope, intercept, r_squared) = linear_fit(&xs, &ys);
        fits.push(DofFit { threshold_ohm: thr, slope, intercept, r_squared });
    }
    Ok(DofCurve { points, fits })
}

fn check_monotonicity(
    points: &[DofPoint],
    radii: &[f64],
    thresholds: &[f64],
) -> Result<()> {
    let at = |rol: f64, thr: f64| -> u64 {
        points
            .iter()
            .find(|p| p.r_v_over_lambda == rol && p.threshold_ohm == thr)
            .map(|p| p.count)
            .unwrap_or(0)
    };
    let mut sorted_r = radii.to_vec();
    sorted_r.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut sorted_t = thresholds.to_vec();
    sorted_t.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for &thr in &sorted_t {
        for w in sorted_r.windows(2) {
            if at(w[0], thr) > at(w[1], thr) {
                return Err(Error::domain(format!(
                    "dof_sweep: count decreased from R_V/λ = {} to {} at threshold {thr} Ohm",
                    w[0], w[1]
                )));
            }
        }
    }
    for &rol in &sorted_r {
        for w in sorted_t.windows(2) {
            if at(rol, w[0]) < at(rol, w[1]) {
                return Err(Error::domain(format!(
                    "dof_sweep: count increased from threshold {} to {} Ohm at R_V/λ = {rol}",
                    w[0], w[1]
                )));
            }
        }
    }
    Ok(())
}

/// Least-squares line fit; returns (slope, intercept, R²).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return (0.0, my, if syy == 0.0 { 1.0 } else { 0.0 });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = (sxy * sxy) / (sxx * syy);
    (slope, intercept, r2)
}
