//! Wavefunction verification against finite-difference oracles and
//! quadrature identities: the vector Helmholtz equation, the curl pairing
//! between the two polarizations, orthonormality of the normalized modes,
//! closed-form norm cross-checks, m-degeneracy, and the uniformity-defect
//! behaviour of the sampled mode products.

mod common;

use modecap_core::cvec3::{CVec3, Orientation};
use modecap_core::geometry::{fibonacci_sphere, uniformity_defect, BallRule, SpherePoint, SurfaceRule};
use modecap_core::power::{transmit_coeff, ETA_OHM};
use modecap_core::specfun::sph_hankel1;
use modecap_core::wavefunctions::{
    eval_radiating, eval_regular, mode_count, norm_u_surface_with_rule, norm_v_volume_with_rule,
    ModeIndex, ModeTable,
};
use num_complex::Complex64;

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Radiating,
    Regular,
}

/// Field in Cartesian components at a Cartesian point.
fn field_cartesian(kind: Kind, mode: ModeIndex, k: f64, xyz: [f64; 3]) -> [Complex64; 3] {
    let [x, y, z] = xyz;
    let r = (x * x + y * y + z * z).sqrt();
    let theta = (z / r).acos();
    let phi = y.atan2(x);
    let pt = SpherePoint::new(theta, phi);
    let v = match kind {
        Kind::Radiating => eval_radiating(mode, k, r, &pt).unwrap(),
        Kind::Regular => eval_regular(mode, k, r, &pt).unwrap(),
    };
    let (st, ct) = (theta.sin(), theta.cos());
    let (sp, cp) = (phi.sin(), phi.cos());
    let r_hat = [st * cp, st * sp, ct];
    let t_hat = [ct * cp, ct * sp, -st];
    let p_hat = [-sp, cp, 0.0];
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for i in 0..3 {
        out[i] = v.r * r_hat[i] + v.theta * t_hat[i] + v.phi * p_hat[i];
    }
    out
}

fn field_norm(f: &[Complex64; 3]) -> f64 {
    f.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// ∇×F by centered differences of the Cartesian components.
fn fd_curl(kind: Kind, mode: ModeIndex, k: f64, p: [f64; 3], h: f64) -> [Complex64; 3] {
    let d = |axis: usize, comp: usize| -> Complex64 {
        let mut hi = p;
        let mut lo = p;
        hi[axis] += h;
        lo[axis] -= h;
        (field_cartesian(kind, mode, k, hi)[comp] - field_cartesian(kind, mode, k, lo)[comp])
            / (2.0 * h)
    };
    [
        d(1, 2) - d(2, 1),
        d(2, 0) - d(0, 2),
        d(0, 1) - d(1, 0),
    ]
}

/// Componentwise FD Laplacian; for these divergence-free fields
/// ∇×∇×F = −ΔF, so the Helmholtz residual is ΔF + k²F.
fn fd_laplacian(kind: Kind, mode: ModeIndex, k: f64, p: [f64; 3], h: f64) -> [Complex64; 3] {
    let center = field_cartesian(kind, mode, k, p);
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for axis in 0..3 {
        let mut hi = p;
        let mut lo = p;
        hi[axis] += h;
        lo[axis] -= h;
        let f_hi = field_cartesian(kind, mode, k, hi);
        let f_lo = field_cartesian(kind, mode, k, lo);
        for c in 0..3 {
            acc[c] += (f_hi[c] - 2.0 * center[c] + f_lo[c]) / (h * h);
        }
    }
    acc
}

#[test]
fn helmholtz_residual_below_tolerance() {
    // ‖ΔF + k²F‖ ≤ 1e-5·‖F‖ at step h = 1e-4/k, i.e. the curl-curl
    // equation ∇×∇×F = k²F holds for both polarizations and both radial
    // kinds.
    let k = 1.3;
    let h = 1e-4 / k;
    let point = [1.1, 0.6, 0.8]; // r ≈ 1.55
    for kind in [Kind::Radiating, Kind::Regular] {
        for p in [1usize, 2, 4, 7, 12, 21, 30] {
            let mode = ModeIndex::from_p(p).unwrap();
            let f = field_cartesian(kind, mode, k, point);
            let lap = fd_laplacian(kind, mode, k, point, h);
            let mut res = 0.0f64;
            for c in 0..3 {
                res += (lap[c] + k * k * f[c]).norm_sqr();
            }
            let res = res.sqrt();
            let scale = field_norm(&f) * k * k;
            assert!(
                res <= 1e-5 * scale.max(1e-30),
                "p={p} kind radiating={} residual {res:.3e} vs scale {scale:.3e}",
                matches!(kind, Kind::Radiating)
            );
        }
    }
}

#[test]
fn curl_pairs_the_polarizations() {
    // ∇×(l=1 mode) = k·(l=2 mode) and ∇×(l=2 mode) = k·(l=1 mode) for the
    // same (n, m): the relation the H-field construction relies on.
    let k = 0.9;
    let h = 1e-5;
    let point = [0.8, -1.2, 0.5];
    for kind in [Kind::Radiating, Kind::Regular] {
        for (n, m) in [(1u32, 0i32), (2, 1), (3, -2)] {
            let l1 = ModeIndex::new(n, m, 1).unwrap();
            let l2 = ModeIndex::new(n, m, 2).unwrap();
            for (src, dst) in [(l1, l2), (l2, l1)] {
                let curl = fd_curl(kind, src, k, point, h);
                let partner = field_cartesian(kind, dst, k, point);
                let mut diff = 0.0f64;
                let mut scale = 0.0f64;
                for c in 0..3 {
                    diff += (curl[c] - k * partner[c]).norm_sqr();
                    scale += (k * partner[c]).norm_sqr();
                }
                assert!(
                    diff.sqrt() <= 1e-6 * scale.sqrt(),
                    "curl pairing failed for n={n} m={m} l={} ({:.3e} vs {:.3e})",
                    src.l(),
                    diff.sqrt(),
                    scale.sqrt()
                );
            }
        }
    }
}

#[test]
fn normalized_mode_grams_are_identity() {
    // ∫_S u_p*·u_{p′} dΩ = δ and ∫_V v_p*·v_{p′} dr = δ to 1e-10 for all 70
    // modes with n ≤ 5.
    let k = 2.0;
    let r_s = 3.0;
    let r_v = 1.0;
    let n_max = 5;
    let table = ModeTable::build(k, r_s, r_v, n_max).unwrap();
    let m = mode_count(n_max);

    let surf = SurfaceRule::for_degree(2 * n_max + 4);
    let mut worst_u = 0.0f64;
    let u_vals: Vec<Vec<CVec3>> = surf.nodes.iter().map(|pt| table.eval_u_all(pt)).collect();
    for a in 0..m {
        for b in a..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for (row, w) in u_vals.iter().zip(&surf.weights) {
                acc += row[a].conj_dot(&row[b]) * *w;
            }
            let expect = if a == b { 1.0 } else { 0.0 };
            worst_u = worst_u.max((acc - Complex64::new(expect, 0.0)).norm());
        }
    }
    assert!(worst_u <= 1e-10, "u-gram defect {worst_u:.3e}");

    let ball = BallRule::new(
        2 * n_max + 4,
        modecap_core::wavefunctions::default_radial_order(n_max, k * r_v),
        r_v,
    )
    .unwrap();
    let mut gram_v = vec![Complex64::new(0.0, 0.0); m * m];
    for (r, wr) in ball.radial_nodes.iter().zip(&ball.radial_weights) {
        for (pt, ws) in ball.surface.nodes.iter().zip(&ball.surface.weights) {
            let vals: Vec<CVec3> = (1..=m).map(|p| table.eval_v(p, *r, pt).unwrap()).collect();
            let w = wr * ws;
            for a in 0..m {
                for b in a..m {
                    gram_v[a * m + b] += vals[a].conj_dot(&vals[b]) * w;
                }
            }
        }
    }
    let mut worst_v = 0.0f64;
    for a in 0..m {
        for b in a..m {
            let expect = if a == b { 1.0 } else { 0.0 };
            worst_v = worst_v.max((gram_v[a * m + b] - Complex64::new(expect, 0.0)).norm());
        }
    }
    assert!(worst_v <= 1e-10, "v-gram defect {worst_v:.3e}");
}

#[test]
fn surface_norm_closed_form_agreement() {
    // l = 1 closed form C² = n(n+1)|hₙ(kR_S)|² across n ≤ 20.
    let k = 1.7;
    let r_s = 2.4;
    let rule = SurfaceRule::for_degree(44);
    for n in 1..=20u32 {
        let mode = ModeIndex::new(n, (n as i32) / 2, 1).unwrap();
        let c = norm_u_surface_with_rule(mode, k, r_s, &rule).unwrap();
        let h = sph_hankel1(n, k * r_s).unwrap();
        let closed = ((n * (n + 1)) as f64).sqrt() * h.norm();
        assert!(
            ((c - closed) / closed).abs() <= 1e-10,
            "n={n}: quadrature {c:e} vs closed {closed:e}"
        );
    }
}

#[test]
fn quadrature_refinement_stability() {
    let k = 2.0;
    let r_s = 3.0;
    let r_v = 1.0;
    for p in [1usize, 4, 11, 30] {
        let mode = ModeIndex::from_p(p).unwrap();
        let n = mode.n();
        let base = SurfaceRule::for_degree(n + 2);
        let fine = SurfaceRule::for_degree(2 * (n + 2));
        let c1 = norm_u_surface_with_rule(mode, k, r_s, &base).unwrap();
        let c2 = norm_u_surface_with_rule(mode, k, r_s, &fine).unwrap();
        assert!(((c1 - c2) / c2).abs() <= 1e-12, "C_p unstable at p={p}");

        let rad = modecap_core::wavefunctions::default_radial_order(n, k * r_v);
        let b1 = BallRule::new(n + 2, rad, r_v).unwrap();
        let b2 = BallRule::new(n + 2, 2 * rad, r_v).unwrap();
        let d1 = norm_v_volume_with_rule(mode, k, &b1).unwrap();
        let d2 = norm_v_volume_with_rule(mode, k, &b2).unwrap();
        assert!(((d1 - d2) / d2).abs() <= 1e-10, "D_p unstable at p={p}");
    }
}

#[test]
fn norms_and_sigma_depend_only_on_n_and_l() {
    let table = ModeTable::build(2.0, 3.0, 1.0, 3).unwrap();
    for n in 1..=3u32 {
        for l in [1u8, 2] {
            let reference = table.row(ModeIndex::new(n, 0, l).unwrap().p()).unwrap();
            for m in -(n as i32)..=n as i32 {
                let row = table.row(ModeIndex::new(n, m, l).unwrap().p()).unwrap();
                assert!(((row.c - reference.c) / reference.c).abs() <= 1e-10);
                assert!(((row.d - reference.d) / reference.d).abs() <= 1e-10);
                assert!(((row.sigma - reference.sigma) / reference.sigma).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn sigma_asymptotic_ratio_improves_with_radius() {
    // max over p ≤ 16 of |ηk⁴R_S²σ_p²/(2T_p) − 1| shrinks from kR_S = 100
    // to kR_S = 200.
    let k = 2.0;
    let r_v = 0.4;
    let deviation = |k_r_s: f64| -> f64 {
        let table = ModeTable::build(k, k_r_s / k, r_v, 2).unwrap();
        let mut worst = 0.0f64;
        for p in 1..=16usize {
            let row = table.row(p).unwrap();
            let t = transmit_coeff(row.mode, k, r_v).unwrap();
            let ratio = ETA_OHM * k.powi(4) * (k_r_s / k).powi(2) * row.sigma * row.sigma / (2.0 * t);
            worst = worst.max((ratio - 1.0).abs());
        }
        worst
    };
    let d100 = deviation(100.0);
    let d200 = deviation(200.0);
    assert!(d200 < d100, "{d200:.3e} !< {d100:.3e}");
    assert!(d100 < 1e-2);
}

#[test]
fn ball_quadrature_against_doubled_reference() {
    // mode-type integrand j₁²(kr)|∇Y₁₁ × r̂|² integrated with the standard
    // rule vs a doubled-order reference
    let k = 2.0;
    let r_v = 1.0;
    let mode = ModeIndex::new(1, 1, 1).unwrap();
    let coarse = BallRule::new(3, 24, r_v).unwrap();
    let fine = BallRule::new(6, 48, r_v).unwrap();
    let integrand = |rule: &BallRule| -> f64 {
        rule.integrate_real(|r, pt| eval_regular(mode, k, r, pt).unwrap().norm_sqr())
    };
    let a = integrand(&coarse);
    let b = integrand(&fine);
    assert!(((a - b) / b).abs() <= 1e-10, "{a:e} vs {b:e}");
}

#[test]
fn mode_product_uniformity_defect_trend() {
    // Sampled products (u_p·ê)*(u_{p′}·ê) over the Fibonacci set tend to
    // their integrals; quadrupling N shrinks the defect.
    let table = ModeTable::build(2.0, 3.0, 1.0, 2).unwrap();
    let rule = SurfaceRule::for_degree(8);
    let fields = |pt: &SpherePoint| table.eval_u_all(pt);
    let cases: [(usize, usize, Orientation); 4] = [
        (1, 1, Orientation::Phi),
        (3, 3, Orientation::Phi),
        (2, 2, Orientation::Radial),
        (1, 5, Orientation::Theta),
    ];
    for (pa, pb, orient) in cases {
        let f = |pt: &SpherePoint| -> Complex64 {
            let v = fields(pt);
            v[pa - 1].component(orient).conj() * v[pb - 1].component(orient)
        };
        let defects: Vec<f64> = [250usize, 1000, 4000]
            .iter()
            .map(|&n| {
                let set = fibonacci_sphere(n, 3.0).unwrap();
                uniformity_defect(&set, f, &rule)
            })
            .collect();
        assert!(
            defects[2] < defects[0],
            "defect not shrinking for ({pa},{pb},{orient:?}): {defects:?}"
        );
    }
}

#[test]
fn theta_component_of_m0_transverse_mode_is_identically_zero() {
    // u_3 is the (n, m, l) = (1, 0, 1) mode: its θ̂ projection vanishes
    // everywhere, so the sampled-product defect for that field is exactly 0
    // at every N.
    let table = ModeTable::build(2.0, 3.0, 1.0, 1).unwrap();
    let rule = SurfaceRule::for_degree(6);
    let f = |pt: &SpherePoint| -> Complex64 {
        let v = table.eval_u(3, pt).unwrap().component(Orientation::Theta);
        v.conj() * v
    };
    for n in [250usize, 1000] {
        let set = fibonacci_sphere(n, 3.0).unwrap();
        assert_eq!(uniformity_defect(&set, f, &rule), 0.0);
    }
}

#[test]
fn harmonic_defect_reference_cases() {
    // |Y₁₁|² has unit integral; the lattice mean converges to it.
    let rule = SurfaceRule::for_degree(6);
    let f = |pt: &SpherePoint| -> Complex64 {
        let y = modecap_core::specfun::sph_harmonic(1, 1, pt.theta, pt.phi).unwrap();
        Complex64::new(y.norm_sqr(), 0.0)
    };
    let defect_at = |n: usize| -> f64 {
        uniformity_defect(&fibonacci_sphere(n, 1.0).unwrap(), f, &rule)
    };
    let d250 = defect_at(250);
    let d1000 = defect_at(1000);
    let d4000 = defect_at(4000);
    assert!(d4000 <= 0.01, "defect at N=4000: {d4000}");
    assert!(d4000 < d1000 && d1000 < d250, "{d250:e} {d1000:e} {d4000:e}");
}
