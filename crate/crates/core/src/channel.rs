//! Receiver dipole circuit model and assembly of the finite-(N, M) channel
//! Y = gΦΣX + Z with the per-mode normalization matrices T and τ.
//!
//! Each receive dipole is a conjugately matched short dipole (load
//! resistance equal to the radiation resistance 80(πL/λ)², zero loss, load
//! reactance cancelling the antenna reactance), read out as Y = V_T/√(8R_T)
//! so that |Y|² is the power delivered to the load. Under the plane-wave
//! receive assumption V_T = L·E·e, the dipole length cancels exactly and
//! the scalar gain collapses to g = −ηk/√160 in the mode-domain channel.

use crate::error::{Error, Result};
use crate::geometry::{fibonacci_sphere, DipoleSet};
use crate::power::{transmit_coeff, ETA_OHM};
use crate::wavefunctions::{mode_count, ModeTable};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

/// All physical constants and geometry of a study, in SI units.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PhysicalConfig {
    /// Wavenumber k [rad/m].
    pub k: f64,
    /// Source-ball radius R_V [m].
    pub r_v: f64,
    /// Receive-sphere radius R_S [m].
    pub r_s: f64,
    /// Normalized receive-antenna density α = N/(8k²R_S²), 0 < α < 1.
    pub alpha: f64,
    /// Highest mode shell; M = 2·n_max·(n_max+2) modes (full shells only).
    pub n_max: u32,
    /// Transmit power constraint P [W].
    pub power_w: f64,
    /// Noise power spectral density N₀ [W/Hz].
    pub n0_w_per_hz: f64,
    /// Channel bandwidth W [Hz], W ≪ ω/2π.
    pub bandwidth_hz: f64,
    /// Dipole length as a fraction of the wavelength (short dipole, ≤ 1/10).
    pub dipole_len_over_lambda: f64,
    /// Seed for all stochastic draws (noise vectors).
    pub seed: u64,
}

impl Default for PhysicalConfig {
    fn default() -> Self {
        // λ = 1 m, kR_S = 100, N = 8αk²R_S² ≈ 10⁴ dipoles.
        PhysicalConfig {
            k: 2.0 * PI,
            r_v: 0.5,
            r_s: 100.0 / (2.0 * PI),
            alpha: 0.125,
            n_max: 3,
            power_w: 1.0,
            n0_w_per_hz: 0.125,
            bandwidth_hz: 1.0,
            dipole_len_over_lambda: 0.02,
            seed: 7,
        }
    }
}

impl PhysicalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(Error::config(format!("k must be > 0, got {}", self.k)));
        }
        if !(self.r_v > 0.0) || !(self.r_s > self.r_v) {
            return Err(Error::config(format!(
                "need r_s > r_v > 0, got r_v = {}, r_s = {}",
                self.r_v, self.r_s
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.n_max < 1 {
            return Err(Error::config("n_max must be >= 1".to_string()));
        }
        if !(self.power_w > 0.0) || !(self.n0_w_per_hz > 0.0) || !(self.bandwidth_hz > 0.0) {
            return Err(Error::config(
                "power_w, n0_w_per_hz and bandwidth_hz must all be > 0".to_string(),
            ));
        }
        // Narrowband assumption W ≪ ω/2π, enforced at 1e-3.
        let carrier_hz = self.omega() / (2.0 * PI);
        if self.bandwidth_hz > 1e-3 * carrier_hz {
            return Err(Error::config(format!(
                "bandwidth {} Hz violates W <= 1e-3·ω/2π = {} Hz",
                self.bandwidth_hz,
                1e-3 * carrier_hz
            )));
        }
        if !(self.dipole_len_over_lambda > 0.0 && self.dipole_len_over_lambda <= 0.1) {
            return Err(Error::config(format!(
                "dipole_len_over_lambda must lie in (0, 0.1], got {}",
                self.dipole_len_over_lambda
            )));
        }
        Ok(())
    }

    pub fn lambda(&self) -> f64 {
        2.0 * PI / self.k
    }

    pub fn omega(&self) -> f64 {
        SPEED_OF_LIGHT_M_PER_S * self.k
    }

    pub fn dipole_len(&self) -> f64 {
        self.dipole_len_over_lambda * self.lambda()
    }

    /// Number of receive dipoles: 8αk²R_S² rounded to the nearest multiple
    /// of 3 (≥ 3) so the orientation cycle is balanced.
    pub fn n_antennas(&self) -> usize {
        let raw = 8.0 * self.alpha * self.k * self.k * self.r_s * self.r_s;
        let rounded = (raw / 3.0).round() as usize * 3;
        rounded.max(3)
    }

    /// Density implied by the rounded antenna count.
    pub fn alpha_eff(&self) -> f64 {
        self.n_antennas() as f64 / (8.0 * self.k * self.k * self.r_s * self.r_s)
    }

    pub fn mode_count(&self) -> usize {
        mode_count(self.n_max)
    }

    /// Per-branch noise power N_W = N₀·W [W].
    pub fn noise_power(&self) -> f64 {
        self.n0_w_per_hz * self.bandwidth_hz
    }
}

/// Load/radiation resistance of a conjugately matched short dipole:
/// 80(πL/λ)² [Ohm]. Rejects L ≥ λ/10 where the short-dipole model breaks.
pub fn dipole_resistance(l_len: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::domain("dipole_resistance: lambda must be > 0".to_string()));
    }
    if !(l_len > 0.0) || l_len > lambda / 10.0 {
        return Err(Error::domain(format!(
            "dipole_resistance: need 0 < L <= lambda/10, got L = {l_len}, lambda = {lambda}"
        )));
    }
    Ok(80.0 * (PI * l_len / lambda).powi(2))
}

/// Scalar field-to-signal gain λ/(√640·π): the dipole length cancels
/// between V_T = L·E·e and Y = V_T/√(8R_T).
pub fn received_signal_gain(lambda: f64) -> f64 {
    lambda / (640f64.sqrt() * PI)
}

/// The same gain assembled through the circuit route L/√(8·R_T(L, λ));
/// exercised by tests to demonstrate the exact L-cancellation.
pub fn received_signal_gain_from_circuit(l_len: f64, lambda: f64) -> Result<f64> {
    let r_t = dipole_resistance(l_len, lambda)?;
    Ok(l_len / (8.0 * r_t).sqrt())
}

/// Sampled mode matrix and the diagonal normalizations of the finite
/// channel Y = gΦΣX + Z.
#[derive(Clone, Debug)]
pub struct ChannelMatrices {
    /// N×M sampled mode matrix, Φ[q][p] = u_p(s_q)·e_q.
    pub phi: DMatrix<Complex64>,
    /// Green-operator singular values σ_p (diagonal of Σ).
    pub sigma: DVector<f64>,
    /// Transmit coefficients T_p (diagonal of T).
    pub t_coeff: DVector<f64>,
    /// τ = R_S·T^{−1/2}·Σ diagonal; tends to √(2/(ηk⁴)) as kR_S grows.
    pub tau: DVector<f64>,
    /// Scalar gain g = −ηk/√160 (< 0).
    pub g: f64,
}

impl ChannelMatrices {
    pub fn n_antennas(&self) -> usize {
        self.phi.nrows()
    }

    pub fn n_modes(&self) -> usize {
        self.phi.ncols()
    }

    /// Effective channel H = gΦΣT^{−1/2} acting on the normalized input
    /// X̃ = T^{1/2}X, so that Y = H X̃ + Z.
    pub fn h_eff(&self) -> DMatrix<Complex64> {
        let m = self.n_modes();
        let mut h = self.phi.clone();
        for p in 0..m {
            let scale = self.g * self.sigma[p] / self.t_coeff[p].sqrt();
            for q in 0..h.nrows() {
                h[(q, p)] *= scale;
            }
        }
        h
    }

    /// (12π/N)·Φ†Φ, the matrix that tends to the identity for uniformly
    /// distributed dipoles.
    pub fn gram_phi_scaled(&self) -> DMatrix<Complex64> {
        let n = self.n_antennas() as f64;
        self.phi.ad_mul(&self.phi) * Complex64::new(12.0 * PI / n, 0.0)
    }

    /// Received/transmit power ratio tr(H†H)/M for an isotropic normalized
    /// input; tends to α as N grows.
    pub fn received_power_ratio(&self) -> f64 {
        let h = self.h_eff();
        let m = self.n_modes();
        let mut tr = 0.0;
        for p in 0..m {
            tr += h.column(p).norm_squared();
        }
        tr / m as f64
    }
}

/// Max |off-diagonal| and max |diagonal − 1| of (12π/N)Φ†Φ.
pub fn gram_defect(gram: &DMatrix<Complex64>) -> (f64, f64) {
    let m = gram.nrows();
    let mut off = 0.0f64;
    let mut diag = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let v = gram[(i, j)];
            if i == j {
                diag = diag.max((v - Complex64::new(1.0, 0.0)).norm());
            } else {
                off = off.max(v.norm());
            }
        }
    }
    (off, diag)
}

/// Build the N×M sampled mode matrix Φ; column p holds u_p(s_q)·e_q over
/// the dipoles q.
pub fn build_phi(table: &ModeTable, dipoles: &DipoleSet) -> Result<DMatrix<Complex64>> {
    if (dipoles.radius - table.r_s).abs() > 1e-12 * table.r_s.abs() {
        return Err(Error::dimension(format!(
            "build_phi: dipole radius {} does not match table r_s {}",
            dipoles.radius, table.r_s
        )));
    }
    let n = dipoles.len();
    let m = table.mode_count();
    let mut phi = DMatrix::from_element(n, m, Complex64::new(0.0, 0.0));
    for (q, (pt, orient)) in dipoles.points.iter().zip(&dipoles.orientations).enumerate() {
        let fields = table.eval_u_all(pt);
        for (p, field) in fields.iter().enumerate() {
            phi[(q, p)] = field.component(*orient);
        }
    }
    Ok(phi)
}

/// A fully assembled finite channel.
#[derive(Clone, Debug)]
pub struct AssembledChannel {
    pub config: PhysicalConfig,
    pub dipoles: DipoleSet,
    pub table: ModeTable,
    pub matrices: ChannelMatrices,
}

impl AssembledChannel {
    /// Density implied by the actual dipole count on this sphere.
    pub fn alpha_eff(&self) -> f64 {
        self.dipoles.len() as f64
            / (8.0 * self.config.k * self.config.k * self.config.r_s * self.config.r_s)
    }
}

/// Build dipoles, mode table and channel matrices from a configuration.
pub fn assemble(config: &PhysicalConfig) -> Result<AssembledChannel> {
    assemble_with_n(config, config.n_antennas())
}

/// Assembly with an explicit dipole count (used by convergence sweeps); the
/// count is rounded to a multiple of 3 to keep orientations balanced.
pub fn assemble_with_n(config: &PhysicalConfig, n_antennas: usize) -> Result<AssembledChannel> {
    config.validate()?;
    let n = ((n_antennas + 1) / 3).max(1) * 3;
    let dipoles = fibonacci_sphere(n, config.r_s)?;
    let table = ModeTable::build(config.k, config.r_s, config.r_v, config.n_max)?;
    let matrices = channel_matrices(config, &table, &dipoles)?;
    Ok(AssembledChannel { config: config.clone(), dipoles, table, matrices })
}

pub fn channel_matrices(
    config: &PhysicalConfig,
    table: &ModeTable,
    dipoles: &DipoleSet,
) -> Result<ChannelMatrices> {
    let phi = build_phi(table, dipoles)?;
    let m = table.mode_count();
    let mut sigma = DVector::zeros(m);
    let mut t_coeff = DVector::zeros(m);
    let mut tau = DVector::zeros(m);
    for p in 1..=m {
        let row = table.row(p)?;
        let t = transmit_coeff(row.mode, config.k, config.r_v)?;
        sigma[p - 1] = row.sigma;
        t_coeff[p - 1] = t;
        tau[p - 1] = config.r_s * row.sigma / t.sqrt();
    }
    let g = -ETA_OHM * config.k / 160f64.sqrt();
    Ok(ChannelMatrices { phi, sigma, t_coeff, tau, g })
}

/// Limit value of the τ diagonal, √(2/(ηk⁴)).
pub fn tau_limit(k: f64) -> f64 {
    (2.0 / (ETA_OHM * k.powi(4))).sqrt()
}

/// i.i.d. circularly symmetric complex Gaussian noise vector with per-branch
/// power n0w (variance n0w/2 per quadrature).
pub fn noise_vector<R: Rng>(n: usize, n0w: f64, rng: &mut R) -> DVector<Complex64> {
    let normal = Normal::new(0.0, (n0w / 2.0).sqrt()).expect("valid std");
    DVector::from_fn(n, |_, _| Complex64::new(normal.sample(rng), normal.sample(rng)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn default_config_is_valid() {
        let cfg = PhysicalConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.n_antennas(), 9999); // 10⁴ rounded to a multiple of 3
        assert_eq!(cfg.mode_count(), 30);
        assert_relative_eq!(cfg.alpha_eff(), 0.1249875, max_relative = 1e-12);
    }

    #[test]
    fn config_rejections() {
        let mut cfg = PhysicalConfig::default();
        cfg.alpha = 1.5;
        assert!(cfg.validate().is_err());
        let mut cfg = PhysicalConfig::default();
        cfg.r_s = cfg.r_v / 2.0;
        assert!(cfg.validate().is_err());
        let mut cfg = PhysicalConfig::default();
        cfg.bandwidth_hz = cfg.omega(); // grossly wideband
        assert!(cfg.validate().is_err());
        let mut cfg = PhysicalConfig::default();
        cfg.dipole_len_over_lambda = 0.2;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn dipole_resistance_values() {
        let r = dipole_resistance(0.02, 1.0).unwrap();
        assert_relative_eq!(r, 0.31582734083485948, max_relative = 1e-12);
        // quadrupling L multiplies R by 16
        let r4 = dipole_resistance(0.08, 1.0).unwrap();
        assert_relative_eq!(r4 / r, 16.0, max_relative = 1e-12);
        assert!(dipole_resistance(0.11, 1.0).is_err());
        assert!(dipole_resistance(0.0, 1.0).is_err());
    }

    #[test]
    fn gain_value_and_l_cancellation() {
        assert_relative_eq!(received_signal_gain(1.0), 0.012582303026121759, max_relative = 1e-12);
        let a = received_signal_gain_from_circuit(1.0 / 50.0, 1.0).unwrap();
        let b = received_signal_gain_from_circuit(1.0 / 100.0, 1.0).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-14);
        assert_relative_eq!(a, received_signal_gain(1.0), max_relative = 1e-14);
    }

    #[test]
    fn phi_first_column_structure() {
        // M = 6 (n_max = 1), N = 3: rows project onto r̂, θ̂, φ̂ in turn.
        let table = ModeTable::build(1.0, 3.0, 1.0, 1).unwrap();
        let dipoles = fibonacci_sphere(3, 3.0).unwrap();
        let phi = build_phi(&table, &dipoles).unwrap();
        for q in 0..3 {
            let u = table.eval_u(1, &dipoles.points[q]).unwrap();
            let expect = u.component(dipoles.orientations[q]);
            assert_eq!(phi[(q, 0)], expect);
        }
        // p = 1 is l = 1 (transverse): the r̂-oriented dipole row vanishes.
        assert_eq!(phi[(0, 0)].norm(), 0.0);
    }

    #[test]
    fn g_is_negative() {
        let cfg = PhysicalConfig::default();
        let ch = assemble_with_n(&cfg, 30).unwrap();
        assert!(ch.matrices.g < 0.0);
        assert_relative_eq!(ch.matrices.g, -ETA_OHM * cfg.k / 160f64.sqrt(), max_relative = 1e-15);
        assert!(ch.matrices.tau.iter().all(|&t| t > 0.0));
        assert!(ch.matrices.t_coeff.iter().all(|&t| t > 0.0));
        assert!(ch.matrices.sigma.iter().all(|&s| s > 0.0));
    }

    #[test]
    fn empty_mode_set_is_rejected_zero_modes() {
        // M = 0 has no shells; n_max 0 rejected at table build.
        assert!(ModeTable::build(1.0, 3.0, 1.0, 0).is_err());
    }

    #[test]
    fn phi_radius_mismatch_rejected() {
        let table = ModeTable::build(1.0, 3.0, 1.0, 1).unwrap();
        let dipoles = fibonacci_sphere(3, 2.0).unwrap();
        assert!(build_phi(&table, &dipoles).is_err());
    }

    #[test]
    fn noise_is_deterministic_under_seed() {
        let mut rng1 = ChaCha20Rng::seed_from_u64(42);
        let mut rng2 = ChaCha20Rng::seed_from_u64(42);
        let z1 = noise_vector(16, 0.125, &mut rng1);
        let z2 = noise_vector(16, 0.125, &mut rng2);
        assert_eq!(z1, z2);
    }
}
