//! Floating-point kernels shared by the averaging engines.
//!
//! Two concerns live here. Sums over `n` use Neumaier compensation and can
//! be split into chunks and merged in any order. Reductions modulo one of
//! `x·m` for an integer `m` are done exactly on the binary expansion of `x`,
//! so iterates like `m(m-1)/2·α` with `m ~ 10⁹` keep full precision.

use num_complex::Complex64;

/// Neumaier (improved Kahan–Babuška) accumulator.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if libm::fabs(self.sum) >= libm::fabs(v) {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

/// Compensated accumulator for complex values (componentwise).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub const fn new() -> Self {
        Self { re: CompensatedSum::new(), im: CompensatedSum::new() }
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn merge(&mut self, other: &Self) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn total(&self) -> Complex64 {
        Complex64::new(self.re.total(), self.im.total())
    }
}

/// Sign, integer mantissa and binary exponent with `|x| = mantissa · 2^exp`.
#[inline]
fn decompose(x: f64) -> (bool, u64, i32) {
    let bits = x.to_bits();
    let negative = bits >> 63 == 1;
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let fraction = bits & ((1u64 << 52) - 1);
    if biased == 0 {
        (negative, fraction, -1074)
    } else {
        (negative, fraction | (1u64 << 52), biased - 1075)
    }
}

/// `2^-k` for `0 <= k <= 1074`.
#[inline]
fn pow2_neg(k: u32) -> f64 {
    libm::ldexp(1.0, -(k as i32))
}

/// Fractional part `{x·m}` in `[0, 1)`, exact up to the final rounding.
///
/// `m` may be given modulo `2^128`; only its residue matters whenever the
/// binary exponent of `x` is at least `-127`. Below that (|x| < 2^-74) the
/// product is formed in floating point from `m_approx`.
pub fn frac_mul_wrapped(x: f64, m_wrapped: u128, m_approx: f64) -> f64 {
    if x == 0.0 || m_wrapped == 0 || !x.is_finite() {
        return 0.0;
    }
    let (negative, mantissa, exp) = decompose(x);
    if exp >= 0 {
        return 0.0;
    }
    let k = (-exp) as u32;
    if k <= 127 {
        let mask = (1u128 << k) - 1;
        let mut r = (mantissa as u128).wrapping_mul(m_wrapped) & mask;
        if negative && r != 0 {
            r = (mask - r + 1) & mask;
        }
        let f = (r as f64) * pow2_neg(k);
        if f >= 1.0 {
            0.0
        } else {
            f
        }
    } else {
        let v = x * m_approx;
        let f = v - libm::floor(v);
        if f >= 1.0 {
            0.0
        } else {
            f
        }
    }
}

/// Fractional part `{x·m}` for an integer `m`.
#[inline]
pub fn frac_mul(x: f64, m: i128) -> f64 {
    frac_mul_wrapped(x, m as u128, m as f64)
}

/// Reduce a real to `[0, 1)`.
#[inline]
pub fn frac(x: f64) -> f64 {
    let f = x - libm::floor(x);
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Distance from `x` to the nearest integer.
#[inline]
pub fn dist_to_int(x: f64) -> f64 {
    libm::fabs(x - libm::round(x))
}

/// Integer and fractional parts of `c·p` with `p` an exact integer.
fn split_term(c: f64, p: Option<i128>, p_approx: f64) -> (i128, f64) {
    if c == 0.0 {
        return (0, 0.0);
    }
    if let Some(p) = p {
        let (negative, mantissa, exp) = decompose(c);
        if let Some(mut q) = (mantissa as i128).checked_mul(p) {
            if negative {
                q = -q;
            }
            if exp >= 0 {
                if exp < 126 {
                    if let Some(v) = q.checked_mul(1i128 << exp) {
                        return (v, 0.0);
                    }
                }
            } else {
                let k = (-exp) as u32;
                if k <= 126 {
                    let mask = (1i128 << k) - 1;
                    return (q >> k, ((q & mask) as f64) * pow2_neg(k));
                }
            }
        }
    }
    let t = c * p_approx;
    let fl = libm::floor(t);
    (fl as i128, t - fl)
}

/// `⌊Σ_j coeffs[j]·n^j⌋`, computed from the exact binary values of the
/// coefficients (no rounding of the individual products).
pub fn floor_poly(coeffs: &[f64], n: i64) -> i64 {
    let mut int_part: i128 = 0;
    let mut frac_part = CompensatedSum::new();
    let mut power: Option<i128> = Some(1);
    let mut power_approx = 1.0f64;
    let nf = n as f64;
    for &c in coeffs {
        let (i, f) = split_term(c, power, power_approx);
        int_part = int_part.saturating_add(i);
        frac_part.add(f);
        power = power.and_then(|p| p.checked_mul(n as i128));
        power_approx *= nf;
    }
    let total = int_part.saturating_add(libm::floor(frac_part.total()) as i128);
    total.clamp(i64::MIN as i128, i64::MAX as i128) as i64
}

/// Horner evaluation of `Σ_j coeffs[j]·n^j`.
#[inline]
pub fn eval_poly(coeffs: &[f64], n: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * n + c)
}

/// `{Σ_j betas[j]·n^j}` in `[0, 1)`, each monomial reduced exactly.
pub fn phase_poly(betas: &[f64], n: i64) -> f64 {
    let mut acc = 0.0f64;
    let mut wrapped: u128 = 1;
    let mut approx = 1.0f64;
    let nw = n as i128 as u128;
    let nf = n as f64;
    for &b in betas {
        acc += frac_mul_wrapped(b, wrapped, approx);
        wrapped = wrapped.wrapping_mul(nw);
        approx *= nf;
    }
    frac(acc)
}

/// `e(t) = exp(2πit)`.
#[inline]
pub fn unit_phase(t: f64) -> Complex64 {
    let (s, c) = libm::sincos(core::f64::consts::TAU * t);
    Complex64::new(c, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_mul_matches_exact_rationals() {
        // 0.5 * 7 = 3.5
        assert_eq!(frac_mul(0.5, 7), 0.5);
        assert_eq!(frac_mul(0.25, -1), 0.75);
        assert_eq!(frac_mul(-0.25, 1), 0.75);
        assert_eq!(frac_mul(3.0, 12345), 0.0);
        assert_eq!(frac_mul(0.0, 12345), 0.0);
    }

    #[test]
    fn frac_mul_large_multiplier_against_wide_integer_reference() {
        // reference: residue of mantissa·m modulo 2^k, taken with rem_euclid
        let x = core::f64::consts::SQRT_2;
        let (_, mantissa, exp) = decompose(x);
        let k = (-exp) as u32;
        for &m in &[1i128, 3, 1_000_000_007, 999_999_999_999, -77_777_777_777] {
            let prod = (mantissa as i128) * m;
            let r = prod.rem_euclid(1i128 << k);
            let expected = r as f64 / (1u128 << k) as f64;
            assert_eq!(frac_mul(x, m), expected, "m = {m}");
        }
    }

    #[test]
    fn floor_poly_handles_signs_and_halves() {
        assert_eq!(floor_poly(&[0.0, 0.1], 35), 3);
        assert_eq!(floor_poly(&[0.0, 0.1], -35), -4);
        assert_eq!(floor_poly(&[0.0, 0.0, 0.1], 15), 22);
        assert_eq!(floor_poly(&[1.0], 0), 1);
        assert_eq!(floor_poly(&[-0.5], 0), -1);
        assert_eq!(floor_poly(&[0.0, 1.0, 1.0], 3), 12);
    }

    #[test]
    fn floor_poly_is_exact_for_dyadic_coefficients() {
        // 2^-40 * n^2 with n = 2^25 gives 2^10 exactly
        let c = libm::ldexp(1.0, -40);
        assert_eq!(floor_poly(&[0.0, 0.0, c], 1 << 25), 1024);
        assert_eq!(floor_poly(&[-libm::ldexp(1.0, -20), 0.0, c], 1 << 25), 1023);
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let mut s = CompensatedSum::new();
        s.extend([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(s.total(), 2.0);
    }

    #[test]
    fn merged_chunks_match_sequential() {
        let vals: std::vec::Vec<f64> = (1..10_000).map(|i| libm::sin(i as f64) / i as f64).collect();
        let mut seq = CompensatedSum::new();
        seq.extend(vals.iter().copied());
        let mut merged = CompensatedSum::new();
        for chunk in vals.chunks(333) {
            let mut part = CompensatedSum::new();
            part.extend(chunk.iter().copied());
            merged.merge(&part);
        }
        assert!((seq.total() - merged.total()).abs() < 1e-15);
    }

    #[test]
    fn phase_poly_reduces_each_monomial() {
        let t = phase_poly(&[0.25, 0.5], 3);
        assert!((t - 0.75).abs() < 1e-15);
        assert_eq!(phase_poly(&[0.0, 1.0], 123_456), 0.0);
    }
}
