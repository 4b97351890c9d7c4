//! Exact reduction of `ω·k^q mod 1`.
//!
//! A finite double `ω ∈ [0, 1)` is `m·2^{-e}` with integer mantissa `m`. The
//! fractional part of `ω·K` for an integer `K` is therefore
//! `((m·K) mod 2^e) / 2^e`, which only needs `K mod 2^e`. For `e ≤ 128` this
//! is wrapping `u128` arithmetic; smaller `ω` fall back to big integers. The
//! only rounding happens in the final conversion to `f64`.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use std::f64::consts::TAU;

/// `(mantissa, e)` with `x = mantissa · 2^{-e}`, for finite `x ∈ [0, 1)`.
fn split(x: f64) -> (u64, u32) {
    debug_assert!((0.0..1.0).contains(&x));
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if biased == 0 {
        // subnormal: x = frac · 2^{-1074}
        (frac, 1074)
    } else {
        let mantissa = frac | (1u64 << 52);
        // x = mantissa · 2^{biased - 1075}
        (mantissa, (1075 - biased) as u32)
    }
}

/// `2^{-e}` without intermediate underflow.
fn scale_down(value: f64, e: u32) -> f64 {
    let mut v = value;
    let mut rem = e as i32;
    while rem > 0 {
        let step = rem.min(1000);
        v *= 2f64.powi(-step);
        rem -= step;
    }
    v
}

/// Power `k^q mod 2^128`.
#[inline]
pub(crate) fn pow_mod_2_128(k: u64, q: u32) -> u128 {
    (k as u128).wrapping_pow(q)
}

/// Fractional part of `x · K`, where `K ≡ k_mod (mod 2^128)` and `big_k`
/// supplies the exact `K` when the exponent of `x` exceeds 128.
#[inline]
fn frac_mul(x: f64, k_mod: u128, big_k: impl FnOnce() -> BigUint) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let (m, e) = split(x);
    let r = if e <= 128 {
        let prod = (m as u128).wrapping_mul(k_mod);
        let r = if e == 128 { prod } else { prod & ((1u128 << e) - 1) };
        scale_down(r as f64, e)
    } else {
        let modulus = BigUint::one() << e as usize;
        let r = (BigUint::from(m) * big_k()) % &modulus;
        if r.is_zero() {
            0.0
        } else {
            scale_down(r.to_f64().unwrap_or(f64::INFINITY), e)
        }
    };
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Fractional part of `ω·K` given only `K mod 2^128`; requires `ω ≥ 2^-75`
/// (or `ω = 0`) so that the binary exponent of `ω` is at most 128.
#[inline]
pub(crate) fn frac_omega_pow_mod(omega: f64, k_mod: u128) -> f64 {
    frac_mul(omega, k_mod, || unreachable!("exponent above 128 for omega={omega}"))
}

/// Fractional part of `ω·k^q`, exact up to one final rounding.
pub fn frac_omega_pow(omega: f64, k: u64, q: u32) -> f64 {
    frac_mul(omega, pow_mod_2_128(k, q), || BigUint::from(k).pow(q))
}

/// Phase table `φ_k = Σ_q ω_q k^q mod 1` for `k = 1..=n`.
pub fn row_phases(omegas: &[f64], n: usize) -> Vec<f64> {
    (1..=n as u64)
        .map(|k| {
            let mut acc = 0.0;
            for (qi, &w) in omegas.iter().enumerate() {
                acc += frac_omega_pow(w, k, qi as u32 + 1);
            }
            acc - acc.floor()
        })
        .collect()
}

/// `e[φ] = exp(2πiφ)` for `φ` already reduced to `[0, 1)`.
#[inline]
pub fn unit_phase(phi: f64) -> Complex64 {
    // centre the argument on zero before scaling by 2π
    let centred = if phi >= 0.5 { phi - 1.0 } else { phi };
    let (s, c) = (TAU * centred).sin_cos();
    Complex64::new(c, s)
}

/// Unit-modulus row `e[φ_k]`, `k = 1..=n`.
pub fn row_exponentials(omegas: &[f64], n: usize) -> Vec<Complex64> {
    row_phases(omegas, n).into_iter().map(unit_phase).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    /// Oracle: exact rational arithmetic on the double's value.
    fn oracle(omega: f64, k: u64, q: u32) -> f64 {
        let w = BigRational::from_float(omega).unwrap();
        let prod = w * BigRational::from_integer(BigUint::from(k).pow(q).into());
        let frac = &prod - prod.floor();
        frac.to_f64().unwrap()
    }

    #[test]
    fn splits_reconstruct_the_double() {
        for &x in &[0.5, 0.25, 0.1, 1e-300, 5e-324, 0.999_999_999_999_999_9] {
            let (m, e) = split(x);
            assert_eq!(scale_down(m as f64, e), x);
        }
    }

    #[test]
    fn small_products_are_exact() {
        assert_eq!(frac_omega_pow(0.5, 3, 1), 0.5);
        assert_eq!(frac_omega_pow(0.25, 2, 2), 0.0);
        assert_eq!(frac_omega_pow(0.0, 17, 5), 0.0);
    }

    #[test]
    fn large_powers_match_rational_oracle() {
        // k^q far beyond 2^53 and beyond 2^128
        for &(w, k, q) in &[(0.123456789, 4000u64, 6u32), (0.987654321, 3999, 18), (1e-30, 4000, 20), (3e-200, 4000, 40)] {
            let got = frac_omega_pow(w, k, q);
            let want = oracle(w, k, q);
            assert!((got - want).abs() < 1e-15, "{w} {k} {q}: {got} vs {want}");
        }
    }

    #[test]
    fn unit_phase_values() {
        let z = unit_phase(0.5);
        assert!((z.re + 1.0).abs() < 1e-15 && z.im.abs() < 1e-15);
        let z = unit_phase(0.25);
        assert!(z.re.abs() < 1e-15 && (z.im - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn reduction_matches_oracle(w in 0.0f64..1.0, k in 1u64..5000, q in 1u32..12) {
            let got = frac_omega_pow(w, k, q);
            let want = oracle(w, k, q);
            let diff = (got - want).abs();
            prop_assert!(diff.min(1.0 - diff) < 1e-15);
        }
    }
}
