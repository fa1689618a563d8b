//! Spherical Bessel functions of the first (jₙ), second (yₙ) and third
//! (hₙ⁽¹⁾ = jₙ + i·yₙ) kind, with derivatives taken in the dimensionless
//! argument.
//!
//! jₙ uses upward recurrence in the oscillatory regime (n < x) and a
//! normalized downward (Miller) recurrence otherwise; upward recurrence of
//! jₙ is unstable for n ≫ x. yₙ is the dominant solution and is always
//! safe to recurse upward.

use crate::error::{Error, Result};
use num_complex::Complex64;

fn check_positive(x: f64, what: &str) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain(format!("{what}: argument must be finite and > 0, got {x}")));
    }
    Ok(())
}

/// Spherical Bessel function jₙ(x) for n ≥ 0, x ≥ 0.
///
/// Relative accuracy ~1e-13 for n ≤ 200, x ≤ 1e4 (limited near zeros of jₙ
/// by argument rounding, as for any fixed-precision evaluation).
pub fn sph_bessel_j(n: u32, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain(format!("sph_bessel_j: argument must be finite and >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    if n == 0 {
        return Ok(x.sin() / x);
    }
    if (n as f64) < x {
        Ok(upward_j(n, x))
    } else {
        Ok(miller_j(n, x))
    }
}

fn j0(x: f64) -> f64 {
    x.sin() / x
}

fn j1(x: f64) -> f64 {
    x.sin() / (x * x) - x.cos() / x
}

fn upward_j(n: u32, x: f64) -> f64 {
    let mut prev = j0(x);
    let mut cur = j1(x);
    for k in 1..n {
        let next = (2 * k + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Downward recurrence with normalization against j₀ or j₁, whichever is
/// better conditioned at this x.
fn miller_j(n: u32, x: f64) -> f64 {
    // Start far enough above n that the contaminating (yₙ-like) component of
    // the arbitrary seed is suppressed below 1e-17 by the time order n is
    // reached; the Airy-region estimate gives Δ ~ (20√x)^(2/3).
    let delta = 32 + (20.0 * x.sqrt()).powf(2.0 / 3.0).ceil() as u64;
    let start = n as u64 + delta;
    let mut f_hi = 0.0_f64; // order k+1
    let mut f = 1e-305_f64; // order k
    let mut f_n = if start == n as u64 { f } else { 0.0 };
    let mut f_1 = 0.0_f64;
    let mut k = start;
    while k > 0 {
        let f_lo = (2 * k + 1) as f64 / x * f - f_hi;
        f_hi = f;
        f = f_lo;
        k -= 1;
        if k == n as u64 {
            f_n = f;
        }
        if k == 1 {
            f_1 = f;
        }
        if f.abs() > 1e280 {
            f *= 1e-280;
            f_hi *= 1e-280;
            f_n *= 1e-280;
            f_1 *= 1e-280;
        }
    }
    let f_0 = f;
    let a0 = j0(x);
    let a1 = j1(x);
    if a0.abs() >= a1.abs() {
        f_n * (a0 / f_0)
    } else {
        f_n * (a1 / f_1)
    }
}

/// All of j₀(x), …, j_{n_max}(x) in one pass; same accuracy as the
/// single-order path.
pub fn sph_bessel_j_column(n_max: u32, x: f64) -> Result<Vec<f64>> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain(format!(
            "sph_bessel_j_column: argument must be finite and >= 0, got {x}"
        )));
    }
    let len = n_max as usize + 1;
    if x == 0.0 {
        let mut col = vec![0.0; len];
        col[0] = 1.0;
        return Ok(col);
    }
    let mut col = vec![0.0; len];
    if (n_max as f64) < x {
        col[0] = j0(x);
        if n_max >= 1 {
            col[1] = j1(x);
            for k in 1..n_max as usize {
                col[k + 1] = (2 * k + 1) as f64 / x * col[k] - col[k - 1];
            }
        }
        return Ok(col);
    }
    // Downward pass capturing the whole column, then one normalization.
    let delta = 32 + (20.0 * x.sqrt()).powf(2.0 / 3.0).ceil() as u64;
    let start = n_max as u64 + delta;
    let mut f_hi = 0.0_f64;
    let mut f = 1e-305_f64;
    let mut k = start;
    while k > 0 {
        let f_lo = (2 * k + 1) as f64 / x * f - f_hi;
        f_hi = f;
        f = f_lo;
        k -= 1;
        if k <= n_max as u64 {
            col[k as usize] = f;
        }
        if f.abs() > 1e280 {
            f *= 1e-280;
            f_hi *= 1e-280;
            for v in col.iter_mut() {
                *v *= 1e-280;
            }
        }
    }
    let a0 = j0(x);
    let a1 = j1(x);
    let scale = if a0.abs() >= a1.abs() || n_max == 0 {
        a0 / col[0]
    } else {
        a1 / col[1]
    };
    for v in col.iter_mut() {
        *v *= scale;
    }
    Ok(col)
}

/// Spherical Bessel function yₙ(x) for n ≥ 0, x > 0.
///
/// Saturates to ±∞ when the true value exceeds the f64 range (deep
/// evanescent regime n ≫ x).
pub fn sph_bessel_y(n: u32, x: f64) -> Result<f64> {
    check_positive(x, "sph_bessel_y")?;
    let mut prev = -x.cos() / x;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = -x.cos() / (x * x) - x.sin() / x;
    for k in 1..n {
        let next = (2 * k + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Spherical Hankel function of the first kind, hₙ⁽¹⁾(x) = jₙ(x) + i·yₙ(x).
pub fn sph_hankel1(n: u32, x: f64) -> Result<Complex64> {
    Ok(Complex64::new(sph_bessel_j(n, x)?, sph_bessel_y(n, x)?))
}

/// (jₙ₋₁, yₙ₋₁, jₙ, yₙ) scaled by a common power of two so that the y pair
/// stays representable; the scale cancels in any ratio of the four values.
fn scaled_jy_pair(n: u32, x: f64) -> (f64, f64, f64, f64, i32) {
    debug_assert!(n >= 1);
    let mut y_prev = -x.cos() / x;
    let mut y_cur = -x.cos() / (x * x) - x.sin() / x;
    let mut exp2 = 0i32;
    for k in 1..n {
        let next = (2 * k + 1) as f64 / x * y_cur - y_prev;
        y_prev = y_cur;
        y_cur = next;
        if y_cur.abs() > 1e250 {
            y_cur = y_cur * 2f64.powi(-1000);
            y_prev = y_prev * 2f64.powi(-1000);
            exp2 += 1000;
        }
    }
    let scale = 2f64.powi(-exp2);
    let j_prev = sph_bessel_j(n - 1, x).unwrap_or(0.0) * scale;
    let j_cur = sph_bessel_j(n, x).unwrap_or(0.0) * scale;
    (j_prev, y_prev, j_cur, y_cur, exp2)
}

/// Logarithmic derivative hₙ⁽¹⁾′(x) / hₙ⁽¹⁾(x) in the dimensionless
/// argument; multiply by k to convert to d/dr at r = x/k.
///
/// Uses f′ₙ = fₙ₋₁ − (n+1)/x · fₙ, so the ratio never forms hₙ′ explicitly
/// and stays finite even where yₙ itself would overflow.
pub fn sph_hankel1_logderiv(n: u32, x: f64) -> Result<Complex64> {
    check_positive(x, "sph_hankel1_logderiv")?;
    if n == 0 {
        // h₀′ = −h₁
        let h0 = sph_hankel1(0, x)?;
        let h1 = sph_hankel1(1, x)?;
        return Ok(-h1 / h0);
    }
    let (jp, yp, jc, yc, _) = scaled_jy_pair(n, x);
    let ratio = Complex64::new(jp, yp) / Complex64::new(jc, yc);
    Ok(ratio - Complex64::new((n + 1) as f64 / x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn j0_j1_closed_forms() {
        assert_relative_eq!(sph_bessel_j(0, 1.0).unwrap(), 0.8414709848078965, max_relative = 1e-14);
        assert_relative_eq!(sph_bessel_j(1, 1.0).unwrap(), 0.30116867893975679, max_relative = 1e-13);
    }

    #[test]
    fn y0_y1_closed_forms() {
        assert_relative_eq!(sph_bessel_y(0, 1.0).unwrap(), -0.5403023058681398, max_relative = 1e-14);
        assert_relative_eq!(sph_bessel_y(1, 1.0).unwrap(), -1.3817732906760362, max_relative = 1e-13);
    }

    #[test]
    fn j_at_zero() {
        assert_eq!(sph_bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(sph_bessel_j(5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(sph_bessel_j(0, -1.0).is_err());
        assert!(sph_bessel_y(0, 0.0).is_err());
        assert!(sph_bessel_y(2, -3.0).is_err());
        assert!(sph_hankel1_logderiv(1, 0.0).is_err());
        assert!(sph_bessel_j(1, f64::NAN).is_err());
    }

    #[test]
    fn hankel_n0_closed_form() {
        // h₀⁽¹⁾(x) = −i e^{ix}/x
        let h = sph_hankel1(0, 1.0).unwrap();
        assert_relative_eq!(h.re, 0.8414709848078965, max_relative = 1e-14);
        assert_relative_eq!(h.im, -0.5403023058681398, max_relative = 1e-14);
    }

    #[test]
    fn hankel_n1_closed_form() {
        // h₁⁽¹⁾(x) = (−1/x − i/x²) e^{ix}
        for &x in &[0.5, 1.0, 2.0] {
            let h = sph_hankel1(1, x).unwrap();
            let e = Complex64::new(0.0, x).exp();
            let expect = Complex64::new(-1.0 / x, -1.0 / (x * x)) * e;
            assert_relative_eq!(h.re, expect.re, max_relative = 1e-13);
            assert_relative_eq!(h.im, expect.im, max_relative = 1e-13);
        }
    }

    #[test]
    fn logderiv_im_part_n0() {
        // Im{h₀′/h₀} = 1/(x²|h₀|²) = 1 since |h₀|² = 1/x².
        for &x in &[0.3, 1.0, 7.5, 42.0] {
            let ld = sph_hankel1_logderiv(0, x).unwrap();
            assert_relative_eq!(ld.im, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn column_matches_single_order_path() {
        for &x in &[0.0, 0.3, 2.0, 15.0, 120.0] {
            let col = sph_bessel_j_column(40, x).unwrap();
            for n in 0..=40u32 {
                let single = sph_bessel_j(n, x).unwrap();
                let c = col[n as usize];
                if single.abs() > 1e-290 {
                    assert_relative_eq!(c, single, max_relative = 1e-11);
                } else {
                    assert!((c - single).abs() < 1e-295);
                }
            }
        }
    }

    #[test]
    fn miller_matches_upward_at_crossover() {
        // n slightly above/below x must agree where both methods are valid.
        for &x in &[10.0, 25.0, 80.0] {
            let n = x as u32;
            let up = upward_j(n - 1, x);
            let down = miller_j(n - 1, x);
            assert_relative_eq!(up, down, max_relative = 1e-11);
        }
    }
}
