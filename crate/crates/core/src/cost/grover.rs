//! Bit-exact Grover query counts: ⌈(π/4)·√t⌉ + 1.
//!
//! The ceiling must be exact for simulator reproducibility, so π and √t are
//! evaluated as fixed-point intervals and the precision is doubled until the
//! bracket pins a single integer. (π·√t/4 is transcendental for t ≥ 1, so
//! it is never an integer and the loop terminates.)

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Queries Grover's algorithm spends searching a t-element set for at most
/// one marked element.
pub fn grover_queries(t: &BigUint) -> Result<BigUint> {
    if t.is_zero() {
        return Err(Error::InvalidParameter {
            name: "t",
            value: 0.0,
            constraint: "t >= 1",
        });
    }
    let mut prec: u32 = 96;
    loop {
        if let Some(ceiling) = try_ceiling(t, prec) {
            return Ok(ceiling + 1u32);
        }
        prec *= 2;
    }
}

/// Convenience wrapper for machine-sized t.
pub fn grover_queries_u64(t: u64) -> Result<BigUint> {
    grover_queries(&BigUint::from(t))
}

/// Attempt to resolve ⌈(π/4)√t⌉ at the given fixed-point precision. Returns
/// None when the interval still straddles an integer boundary.
fn try_ceiling(t: &BigUint, prec: u32) -> Option<BigUint> {
    let (pi_lo, pi_hi) = pi_fixed(prec);
    // floor(√t · 2^prec): s_lo ≤ √t·2^prec < s_lo + 1
    let s_lo = BigInt::from((t << (2 * prec)).sqrt());
    let s_hi = &s_lo + 1;
    // (π/4)√t · 2^(2·prec+2) is bracketed by these products.
    let shift = 2 * prec + 2;
    let lo = ceil_div_pow2(&(pi_lo * &s_lo), shift);
    let hi = ceil_div_pow2(&(pi_hi * &s_hi), shift);
    if lo == hi {
        Some(lo.to_biguint().expect("positive"))
    } else {
        None
    }
}

/// ⌈a / 2^shift⌉ for positive a.
fn ceil_div_pow2(a: &BigInt, shift: u32) -> BigInt {
    debug_assert!(a.is_positive());
    let one_less = (BigInt::one() << shift) - 1;
    (a + one_less) >> shift
}

/// [lo, hi] enclosing π·2^prec, via Machin's formula
/// π = 16·atan(1/5) − 4·atan(1/239) with per-term floor-error tracking.
fn pi_fixed(prec: u32) -> (BigInt, BigInt) {
    let (a5_lo, a5_hi) = atan_recip_fixed(5, prec);
    let (a239_lo, a239_hi) = atan_recip_fixed(239, prec);
    let lo: BigInt = a5_lo * 16 - a239_hi * 4;
    let hi: BigInt = a5_hi * 16 - a239_lo * 4;
    debug_assert!(lo.is_positive() && lo <= hi);
    (lo, hi)
}

/// [lo, hi] enclosing atan(1/x)·2^prec from the alternating series
/// Σ (−1)^k / ((2k+1)·x^(2k+1)). Each term is floored, so the enclosure
/// widens by one unit per term plus one for the truncated tail.
fn atan_recip_fixed(x: u64, prec: u32) -> (BigInt, BigInt) {
    let scale = BigInt::one() << prec;
    let x = BigInt::from(x);
    let xx = &x * &x;
    let mut xpow = x.clone();
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    let mut k = 0u32;
    loop {
        let raw = &scale / (&xpow * (2 * k + 1));
        if raw.is_zero() {
            // truncated tail has the sign of the first omitted term and
            // magnitude below one unit
            if k % 2 == 0 {
                hi += 1;
            } else {
                lo -= 1;
            }
            break;
        }
        if k % 2 == 0 {
            lo += &raw;
            hi += &raw + 1;
        } else {
            lo -= &raw + 1;
            hi -= &raw;
        }
        xpow *= &xx;
        k += 1;
    }
    (lo, hi)
}
