//! Guessing moments, entropy sandwich bounds and quantum speed-up reports.
//!
//! The classical cost of guessing a key in decreasing-probability order is
//! T_C = Σ i·p_i; the quantum cost is T_Q = Σ √i·p_i. Both are special
//! cases of the moment Σ i^ρ·p_i, which is sandwiched by
//!
//! ```text
//! 2^(ρ·H_{1/(1+ρ)}) / (1 + log2|K|)^ρ  ≤  Σ i^ρ p_i  ≤  2^(ρ·H_{1/(1+ρ)})
//! ```
//!
//! Moments are reported in the log2 domain: T_C ≈ 2^(H_{1/2}·n) overflows
//! linear doubles long before interesting n. The brute-force oracle stays in
//! the linear domain on purpose — it shares no code with the typed
//! evaluation it checks.

mod grover;

pub use grover::{grover_queries, grover_queries_u64};

use num_bigint::BigUint;
use serde::Serialize;

use crate::dist::{EntropyFamily, ExplicitDistribution, ProductDistribution};
use crate::error::{Error, Result};
use crate::logdomain::{log2_biguint, Log2Accumulator, NeumaierSum};
use crate::rank::RankTable;

/// Largest key count the linear-domain brute-force oracle will expand.
pub const BRUTE_FORCE_LIMIT: u64 = 1 << 24;

/// Class blocks at most this wide get their √i sum evaluated term by term;
/// wider blocks use the integral bracket.
const EXACT_SQRT_BLOCK: u64 = 1 << 16;

/// Per-class bracket widening covering f64 evaluation error (bits).
const BRACKET_ALLOWANCE_BITS: f64 = 5.684341886080802e-14; // 2^-44

/// Exact value or certified bracket for a guessing moment, in bits, together
/// with the two-sided entropy bound evaluated on the same instance.
#[derive(Clone, Debug, Serialize)]
pub struct CostReport {
    pub rho: f64,
    pub log2_lower: f64,
    pub log2_upper: f64,
    pub arikan_log2_lower: f64,
    pub arikan_log2_upper: f64,
}

impl CostReport {
    pub fn bracket_width_bits(&self) -> f64 {
        self.log2_upper - self.log2_lower
    }
}

/// Quantum speed-up of prefix-Grover search over classical enumeration.
#[derive(Clone, Debug, Serialize)]
pub struct SpeedupReport {
    /// Finite-size lower bound 2(H_1/2 - log2(1+log2|K|))/H_2/3. Can go
    /// negative for tiny key spaces; reported as-is.
    pub s_lower: f64,
    /// 2·H_1/2 / H_2/3, the large-n limit. ≥ 2, with equality exactly for
    /// uniform distributions.
    pub s_asymptotic: f64,
}

/// log2(e·π), the constant factor in Montanaro's expected runtime. Reported
/// as metadata only; asymptotic speed-ups ignore constant factors.
pub fn montanaro_factor_log2() -> f64 {
    (std::f64::consts::E * std::f64::consts::PI).log2()
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidParameter {
            name: "rho",
            value: rho,
            constraint: "rho > 0",
        });
    }
    Ok(())
}

/// Independent oracle: sort linear probabilities descending and accumulate
/// Σ i^ρ·p_i with compensated summation.
fn moment_from_log2_probs(log_probs: &[f64], rho: f64) -> f64 {
    let mut probs: Vec<f64> = log_probs.iter().map(|&lp| lp.exp2()).collect();
    probs.sort_by(|a, b| b.partial_cmp(a).expect("finite probabilities"));
    let mut sum = NeumaierSum::new();
    for (i, &p) in probs.iter().enumerate() {
        sum.add(((i + 1) as f64).powf(rho) * p);
    }
    sum.total()
}

/// Brute-force moment of an explicit distribution.
pub fn moment_bruteforce_explicit(d: &ExplicitDistribution, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    if d.len() as u64 > BRUTE_FORCE_LIMIT {
        return Err(Error::InstanceTooLarge {
            size: BigUint::from(d.len()),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    Ok(moment_from_log2_probs(d.log2_probs(), rho))
}

/// Brute-force moment of a small product distribution, by expanding all
/// |A|^n keys.
pub fn moment_bruteforce_product(d: &ProductDistribution, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let lps = d.expand_log2_probs(BRUTE_FORCE_LIMIT)?;
    Ok(moment_from_log2_probs(&lps, rho))
}

/// Typed evaluation of the guessing moment over a rank table.
///
/// ρ = 1 uses the exact arithmetic-series block sum and returns a zero-width
/// bracket (the endpoints agree to f64 accumulation error, ~2^-50 relative).
/// ρ = 1/2 brackets each block's Σ√i between ∫_{a-1}^{b}√x dx and
/// ∫_{a}^{b+1}√x dx (tightened by the rectangle bounds and evaluated term by
/// term for blocks narrower than 2^16), accumulating both ends in the log
/// domain.
pub fn moment_typed(tbl: &RankTable, rho: f64) -> Result<CostReport> {
    if rho != 1.0 && rho != 0.5 {
        return Err(Error::UnsupportedRho(rho));
    }
    let d = ProductDistribution::new(tbl.atom().clone(), tbl.n())?;
    let (arikan_log2_lower, arikan_log2_upper) = arikan_bounds(&d, rho)?;

    let (log2_lower, log2_upper) = if rho == 1.0 {
        let mut acc = Log2Accumulator::new();
        let mut start = BigUint::from(1u32);
        for (class, cum) in tbl.classes().iter().zip(tbl.cum_counts()) {
            // p · Σ_{i=a}^{b} i = p · (a+b)(b-a+1)/2, exactly
            let series = ((&start + cum) * class.cardinality()) >> 1;
            acc.push(class.log2_prob() + log2_biguint(&series));
            start = cum + 1u32;
        }
        let total = acc.log2_total();
        (total, total)
    } else {
        let mut lower = Log2Accumulator::new();
        let mut upper = Log2Accumulator::new();
        let mut start = BigUint::from(1u32);
        for (class, cum) in tbl.classes().iter().zip(tbl.cum_counts()) {
            let (lo, hi) = sqrt_block_bracket(&start, cum, class.cardinality());
            lower.push(class.log2_prob() + lo);
            upper.push(class.log2_prob() + hi);
            start = cum + 1u32;
        }
        (
            lower.log2_total() - BRACKET_ALLOWANCE_BITS,
            upper.log2_total() + BRACKET_ALLOWANCE_BITS,
        )
    };

    Ok(CostReport {
        rho,
        log2_lower,
        log2_upper,
        arikan_log2_lower,
        arikan_log2_upper,
    })
}

/// log2 bracket on Σ_{i=a}^{b} √i.
fn sqrt_block_bracket(a: &BigUint, b: &BigUint, count: &BigUint) -> (f64, f64) {
    use num_traits::ToPrimitive;
    if let (Some(af), Some(bf)) = (a.to_u64(), b.to_u64()) {
        if bf <= (1 << 52) && bf - af < EXACT_SQRT_BLOCK {
            let mut sum = NeumaierSum::new();
            for i in af..=bf {
                sum.add((i as f64).sqrt());
            }
            let v = sum.total().log2();
            return (v - BRACKET_ALLOWANCE_BITS, v + BRACKET_ALLOWANCE_BITS);
        }
    }
    let log2_count = log2_biguint(count);
    let la = log2_biguint(a);
    let lb = log2_biguint(b);
    // rectangle bounds: count·√a ≤ Σ ≤ count·√b
    let rect_lo = log2_count + 0.5 * la;
    let rect_hi = log2_count + 0.5 * lb;
    // integral bounds: ∫_{a-1}^{b} ≤ Σ ≤ ∫_{a}^{b+1}
    let int_lo = log2_sqrt_integral(&(a - 1u32), b);
    let int_hi = log2_sqrt_integral(a, &(b + 1u32));
    (
        rect_lo.max(int_lo) - BRACKET_ALLOWANCE_BITS,
        rect_hi.min(int_hi) + BRACKET_ALLOWANCE_BITS,
    )
}

/// log2 ∫_A^B √x dx, evaluated cancellation-free via
/// (2/3)(B-A)(B + √(AB) + A)/(√B + √A).
fn log2_sqrt_integral(a: &BigUint, b: &BigUint) -> f64 {
    use num_traits::Zero;
    let diff = b - a; // B > A always holds here
    if diff.is_zero() {
        return f64::NEG_INFINITY;
    }
    let lb = log2_biguint(b);
    let correction = if a.is_zero() {
        0.0
    } else {
        let la = log2_biguint(a);
        let sqrt_r = (0.5 * (la - lb)).exp2(); // √(A/B) ∈ (0, 1]
        ((1.0 + sqrt_r + sqrt_r * sqrt_r) / (1.0 + sqrt_r)).log2()
    };
    (2f64 / 3.0).log2() + log2_biguint(&diff) + 0.5 * lb + correction
}

/// Two-sided entropy bound on the moment Σ i^ρ·p_i, in bits:
/// upper = ρ·H_{1/(1+ρ)}, lower = upper − ρ·log2(1 + log2|K|).
pub fn arikan_bounds<D: EntropyFamily + ?Sized>(d: &D, rho: f64) -> Result<(f64, f64)> {
    check_rho(rho)?;
    let alpha = 1.0 / (1.0 + rho);
    let upper = rho * d.renyi_entropy(alpha)?;
    let lower = upper - rho * (1.0 + d.log2_support_size()).log2();
    Ok((lower, upper))
}

/// Quantum speed-up report from the two Rényi entropies and the key-space
/// size, all in bits.
pub fn speedup_from_entropies(
    h_half_bits: f64,
    h_twothirds_bits: f64,
    log2_support: f64,
) -> Result<SpeedupReport> {
    if h_twothirds_bits <= 0.0 {
        return Err(Error::DegenerateDistribution);
    }
    Ok(SpeedupReport {
        s_lower: 2.0 * (h_half_bits - (1.0 + log2_support).log2()) / h_twothirds_bits,
        s_asymptotic: 2.0 * h_half_bits / h_twothirds_bits,
    })
}

/// Quantum speed-up of any finite-support distribution.
pub fn speedup<D: EntropyFamily + ?Sized>(d: &D) -> Result<SpeedupReport> {
    speedup_from_entropies(
        d.renyi_entropy(0.5)?,
        d.renyi_entropy(2.0 / 3.0)?,
        d.log2_support_size(),
    )
}

/// Small-noise LPN speed-up floor: s ≥ (1/3)·p^(-1/6) for Ber(p)^n keys.
pub fn lpn_small_noise_bound(p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 0.5) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            constraint: "0 < p <= 1/2",
        });
    }
    Ok(p.powf(-1.0 / 6.0) / 3.0)
}

#[cfg(test)]
mod tests;
