//! MIMO capacity of the assembled channel: water-filling under the trace
//! power constraint, the finite-M closed form MW·log₂(1 + αP/(M·N_W)), and
//! the large-system limit (αP/N₀)·log₂e.
//!
//! Rates are reported in bits throughout (log₂); the natural-log limit is
//! honored by reporting it as (αP/N₀)·log₂e.

use crate::channel::{assemble_with_n, ChannelMatrices, PhysicalConfig};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Result of a water-filling allocation.
#[derive(Clone, Debug)]
pub struct WaterfillResult {
    /// Optimal per-channel powers, summing to P (empty gains ⇒ empty).
    pub allocation: Vec<f64>,
    /// Σ log₂(1 + gᵢPᵢ/N_W), without the bandwidth factor.
    pub rate_factor_bits: f64,
    /// Water level ν of the active set (0 when no channels).
    pub water_level: f64,
}

/// Water-filling over parallel channels with power gains `gains`, total
/// power `p` and per-channel noise `n_w`: maximizes Σ log₂(1 + gᵢPᵢ/N_W)
/// subject to ΣPᵢ = P, Pᵢ ≥ 0.
pub fn waterfill(gains: &[f64], p: f64, n_w: f64) -> Result<WaterfillResult> {
    if gains.is_empty() {
        return Ok(WaterfillResult { allocation: vec![], rate_factor_bits: 0.0, water_level: 0.0 });
    }
    if !(p > 0.0) || !(n_w > 0.0) {
        return Err(Error::domain(format!("waterfill: need P > 0 and N_W > 0, got {p}, {n_w}")));
    }
    if gains.iter().any(|&g| !(g > 0.0) || !g.is_finite()) {
        return Err(Error::domain("waterfill: all gains must be finite and > 0".to_string()));
    }
    // Inverse gains c_i = N_W/g_i sorted ascending; the active set is a
    // prefix. ν_k = (P + Σ_{i<k} c_i)/k is the water level with k channels
    // active; the optimal k is the largest one with ν_k > c_{k−1}.
    let mut order: Vec<usize> = (0..gains.len()).collect();
    let c: Vec<f64> = gains.iter().map(|g| n_w / g).collect();
    order.sort_by(|&a, &b| c[a].partial_cmp(&c[b]).unwrap());
    let sorted_c: Vec<f64> = order.iter().map(|&i| c[i]).collect();
    let mut prefix = 0.0;
    let mut best_k = 1;
    let mut best_level = p + sorted_c[0];
    for k in 1..=sorted_c.len() {
        prefix += sorted_c[k - 1];
        let level = (p + prefix) / k as f64;
        if level > sorted_c[k - 1] {
            best_k = k;
            best_level = level;
        } else {
            break;
        }
    }
    let mut allocation = vec![0.0; gains.len()];
    let mut rate = 0.0;
    for (rank, &i) in order.iter().enumerate() {
        if rank < best_k {
            allocation[i] = best_level - c[i];
            rate += (best_level / c[i]).log2();
        }
    }
    // Exact trace: spread any rounding residue over the active set.
    let total: f64 = allocation.iter().sum();
    let residue = p - total;
    if residue != 0.0 {
        let share = residue / best_k as f64;
        for &i in order.iter().take(best_k) {
            allocation[i] += share;
        }
    }
    Ok(WaterfillResult { allocation, rate_factor_bits: rate, water_level: best_level })
}

/// Closed-form rate M·W·log₂(1 + αP/(M·N_W)) [bits/s].
pub fn closed_form_rate(m: usize, w: f64, alpha: f64, p: f64, n_w: f64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let mf = m as f64;
    mf * w * (1.0 + alpha * p / (mf * n_w)).log2()
}

/// Large-system capacity limit (αP/N₀)·log₂e [bits/s]; independent of the
/// bandwidth and of the source-region size.
pub fn capacity_limit(alpha: f64, p: f64, n0: f64) -> f64 {
    alpha * p / n0 * std::f64::consts::LOG2_E
}

/// Water-filled capacity of an assembled finite channel plus the matching
/// closed form and limit values.
#[derive(Clone, Debug)]
pub struct CapacityResult {
    pub rate_bits_per_s: f64,
    pub allocation: Vec<f64>,
    pub water_level: f64,
    pub closed_form_rate: f64,
    pub limit_rate: f64,
}

/// Relative eigenvalue floor below which a channel is treated as zero.
const EIGENVALUE_FLOOR: f64 = 1e-14;

/// Eigenvalues of H†H for the effective channel.
pub fn channel_gains(matrices: &ChannelMatrices) -> Vec<f64> {
    let h = matrices.h_eff();
    let gram = h.ad_mul(&h);
    hermitian_eigenvalues(&gram)
}

/// Eigenvalues of a Hermitian PSD matrix, clamped at zero.
pub fn hermitian_eigenvalues(gram: &DMatrix<Complex64>) -> Vec<f64> {
    let eig = gram.clone().symmetric_eigen();
    eig.eigenvalues.iter().map(|&v| v.max(0.0)).collect()
}

/// Finite-(N, M) water-filled capacity: rate = W·Σlog₂(1 + λᵢPᵢ/N_W) over
/// the eigenvalues λᵢ of H†H, with true water-filling over the numerically
/// unequal eigenvalues (equal power is only optimal in the limit).
pub fn capacity_nm(
    matrices: &ChannelMatrices,
    alpha: f64,
    p: f64,
    n0: f64,
    w: f64,
) -> Result<CapacityResult> {
    let n_w = n0 * w;
    let mut gains = channel_gains(matrices);
    let max_gain = gains.iter().cloned().fold(0.0, f64::max);
    gains.retain(|&g| g > EIGENVALUE_FLOOR * max_gain);
    let wf = waterfill(&gains, p, n_w)?;
    Ok(CapacityResult {
        rate_bits_per_s: w * wf.rate_factor_bits,
        allocation: wf.allocation,
        water_level: wf.water_level,
        closed_form_rate: closed_form_rate(matrices.n_modes(), w, alpha, p, n_w),
        limit_rate: capacity_limit(alpha, p, n0),
    })
}

/// One row of a capacity convergence sweep.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceRow {
    pub m: usize,
    pub n: usize,
    pub rate_finite: f64,
    pub rate_closed_form: f64,
    pub rate_limit: f64,
}

impl ConvergenceRow {
    pub fn ratio_to_limit(&self) -> f64 {
        self.rate_finite / self.rate_limit
    }
}

/// Rate table over a grid of mode truncations and antenna counts, with the
/// density α held fixed: the sphere radius scales as √(N/8α)/k so each row
/// is a consistent (N, R_S) pair, and the finite rate converges to the
/// closed form as N grows.
pub fn convergence_study(
    config: &PhysicalConfig,
    n_max_list: &[u32],
    n_list: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    if n_max_list.is_empty() || n_list.is_empty() {
        return Err(Error::domain("convergence_study: both grid lists must be nonempty".to_string()));
    }
    let mut rows = Vec::with_capacity(n_max_list.len() * n_list.len());
    for &n_max in n_max_list {
        for &n in n_list {
            let mut cfg = config.clone();
            cfg.n_max = n_max;
            cfg.r_s = (n as f64 / (8.0 * config.alpha)).sqrt() / config.k;
            if cfg.r_s <= cfg.r_v {
                return Err(Error::config(format!(
                    "convergence_study: N = {n} places the receive sphere (r_s = {}) inside r_v = {}",
                    cfg.r_s, cfg.r_v
                )));
            }
            let ch = assemble_with_n(&cfg, n)?;
            let alpha_eff = ch.alpha_eff();
            let cap = capacity_nm(
                &ch.matrices,
                alpha_eff,
                cfg.power_w,
                cfg.n0_w_per_hz,
                cfg.bandwidth_hz,
            )?;
            rows.push(ConvergenceRow {
                m: ch.matrices.n_modes(),
                n: ch.dipoles.len(),
                rate_finite: cap.rate_bits_per_s,
                rate_closed_form: cap.closed_form_rate,
                rate_limit: cap.limit_rate,
            });
        }
    }
    Ok(rows)
}

/// log|det(M)| of a square complex matrix via LU.
pub fn log_abs_det(m: &DMatrix<Complex64>) -> f64 {
    let lu = m.clone().lu();
    let u = lu.u();
    let mut acc = 0.0;
    for i in 0..u.nrows().min(u.ncols()) {
        acc += u[(i, i)].norm().ln();
    }
    acc
}
