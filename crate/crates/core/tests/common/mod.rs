//! Test-only oracles, independent of the library's computation paths:
//! double-double (~31-digit) arithmetic, an ascending-series spherical
//! Bessel evaluator, an extended-precision normalized Legendre recurrence,
//! and an exchange-descent water-filling maximizer.

#![allow(dead_code)]

/// Unevaluated double-double value hi + lo with |lo| ≤ ulp(hi)/2.
#[derive(Clone, Copy, Debug)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn from_f64(a: f64) -> Dd {
        Dd { hi: a, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let (s1, s2b) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2b + t2);
        Dd { hi, lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(Dd { hi: -o.hi, lo: -o.lo })
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, o.hi);
        let p2 = p2 + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f64(q2));
        let q3 = r.hi / o.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e }.add(Dd::from_f64(q3))
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        self.mul(Dd::from_f64(b))
    }

    pub fn div_f64(self, b: f64) -> Dd {
        self.div(Dd::from_f64(b))
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::from_f64(0.0);
        }
        let s = self.hi.sqrt();
        // one Newton step in double-double doubles the digit count
        let e = self.sub(Dd::from_f64(s).mul(Dd::from_f64(s))).div_f64(2.0 * s);
        Dd::from_f64(s).add(e)
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn abs(self) -> f64 {
        self.to_f64().abs()
    }
}

/// jₙ(x) by the ascending series x^n/(2n+1)!! · Σ_k (−x²/2)^k / (k!(2n+2k+1)!!)
/// in double-double precision. Accurate for x ≲ 30 (beyond that the
/// alternating series cancels too many digits even at ~31 digits).
pub fn dd_sph_bessel_j_series(n: u32, x: f64, terms: usize) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let xd = Dd::from_f64(x);
    let mut prefactor = Dd::from_f64(1.0);
    for k in 1..=n {
        prefactor = prefactor.mul(xd).div_f64((2 * k + 1) as f64);
    }
    let minus_half_x2 = xd.mul(xd).div_f64(-2.0);
    let mut term = Dd::from_f64(1.0);
    let mut sum = Dd::from_f64(1.0);
    for k in 0..terms {
        term = term
            .mul(minus_half_x2)
            .div_f64((k + 1) as f64)
            .div_f64((2 * n as usize + 2 * k + 3) as f64);
        sum = sum.add(term);
        if term.abs() < 1e-40 * sum.abs().max(1e-300) {
            break;
        }
    }
    prefactor.mul(sum).to_f64()
}

/// Fully normalized associated Legendre P̄_nm(u) (Condon–Shortley phase)
/// by the stable recurrence carried in double-double precision.
pub fn dd_assoc_legendre_normalized(n: u32, m: u32, u: f64) -> f64 {
    assert!(m <= n);
    let ud = Dd::from_f64(u);
    let one = Dd::from_f64(1.0);
    let s = one.sub(ud.mul(ud)).sqrt();
    // π carried as a double-double so the 1/√(4π) seed is good to ~31 digits
    let pi_dd = Dd { hi: std::f64::consts::PI, lo: 1.2246467991473532e-16 };
    let mut p = one.div(pi_dd.mul_f64(4.0).sqrt());
    for k in 1..=m {
        let coeff = Dd::from_f64((2 * k + 1) as f64).div_f64((2 * k) as f64).sqrt();
        p = p.mul(coeff).mul(s).neg();
    }
    if n == m {
        return p.to_f64();
    }
    let mut prev = p;
    let mut cur = Dd::from_f64((2 * m + 3) as f64).sqrt().mul(ud).mul(p);
    for l in m + 2..=n {
        let lf = l as f64;
        let mf = m as f64;
        let a = Dd::from_f64((2.0 * lf + 1.0) * (2.0 * lf - 1.0))
            .div_f64((lf - mf) * (lf + mf))
            .sqrt();
        let b = Dd::from_f64((lf - 1.0 + mf) * (lf - 1.0 - mf))
            .div_f64((2.0 * lf - 1.0) * (2.0 * lf - 3.0))
            .sqrt();
        let next = a.mul(ud.mul(cur).sub(b.mul(prev)));
        prev = cur;
        cur = next;
    }
    cur.to_f64()
}

/// Independent water-filling maximizer: uniform start, then pairwise
/// power exchanges with a geometrically shrinking step (concave objective
/// on the simplex, so exchange-stationary means globally optimal).
/// Returns the achieved Σ log₂(1 + gᵢPᵢ/N_W).
pub fn waterfill_rate_oracle(gains: &[f64], p: f64, n_w: f64) -> f64 {
    let k = gains.len();
    let mut alloc = vec![p / k as f64; k];
    let rate = |alloc: &[f64]| -> f64 {
        alloc
            .iter()
            .zip(gains)
            .map(|(a, g)| (1.0 + g * a / n_w).log2())
            .sum()
    };
    let mut step = p / 8.0;
    while step > 1e-9 * p {
        let mut improved = true;
        while improved {
            improved = false;
            let base = rate(&alloc);
            for i in 0..k {
                for j in 0..k {
                    if i == j || alloc[j] < step {
                        continue;
                    }
                    alloc[j] -= step;
                    alloc[i] += step;
                    if rate(&alloc) > base + 1e-15 {
                        improved = true;
                    } else {
                        alloc[i] -= step;
                        alloc[j] += step;
                    }
                }
            }
        }
        step /= 4.0;
    }
    rate(&alloc)
}
