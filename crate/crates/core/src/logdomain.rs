//! Log2-domain arithmetic helpers.
//!
//! All probabilities in this crate live in the log2 domain so that n-fold
//! product distributions survive n in the thousands. Conversions to the
//! linear domain happen only inside the accumulators below, which keep a
//! floating anchor exponent so that sums of terms spanning thousands of
//! binary orders of magnitude stay accurate.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// log2(2^a + 2^b), stable for any ordering and for -inf inputs.
pub fn log2_add_exp2(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2
}

/// log2(sum of 2^v) over a slice, shifted by the maximum for stability.
pub fn log2_sum_exp2(values: &[f64]) -> f64 {
    let mut acc = Log2Accumulator::new();
    for &v in values {
        acc.push(v);
    }
    acc.log2_total()
}

/// Neumaier-compensated linear summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }

    /// Exact scaling by a power of two (used when rebasing the anchor).
    fn scale_pow2(&mut self, exp: i32) {
        let f = (exp as f64).exp2();
        self.sum *= f;
        self.comp *= f;
    }
}

/// Accumulates positive terms given as log2 values, returning the log2 of
/// their sum. Keeps an integer anchor exponent and a compensated linear sum
/// relative to it, so any number of terms of any magnitude can be combined
/// with ~1 ulp relative error.
#[derive(Clone, Debug)]
pub struct Log2Accumulator {
    anchor: f64,
    sum: NeumaierSum,
    empty: bool,
}

const RESCALE_STEP: f64 = 512.0;

impl Log2Accumulator {
    pub fn new() -> Self {
        Self {
            anchor: 0.0,
            sum: NeumaierSum::new(),
            empty: true,
        }
    }

    /// Add a term whose value is 2^log2_term.
    pub fn push(&mut self, log2_term: f64) {
        if log2_term == f64::NEG_INFINITY {
            return;
        }
        if self.empty {
            self.anchor = log2_term;
            self.sum.add(1.0);
            self.empty = false;
            return;
        }
        let rel = log2_term - self.anchor;
        if rel > RESCALE_STEP {
            // Rebase upward in exact power-of-two steps.
            let steps = ((rel - RESCALE_STEP) / RESCALE_STEP).ceil() as i32 + 1;
            self.anchor += RESCALE_STEP * steps as f64;
            self.sum.scale_pow2(-(512 * steps));
            self.sum.add((log2_term - self.anchor).exp2());
        } else {
            self.sum.add(rel.exp2());
        }
        // Keep the running sum from overflowing after many pushes.
        if self.sum.total() > RESCALE_STEP.exp2() {
            self.anchor += RESCALE_STEP;
            self.sum.scale_pow2(-512);
        }
    }

    pub fn log2_total(&self) -> f64 {
        if self.empty {
            return f64::NEG_INFINITY;
        }
        self.anchor + self.sum.total().log2()
    }
}

impl Default for Log2Accumulator {
    fn default() -> Self {
        Self::new()
    }
}

/// log2 of a big natural number, accurate to ~2^-50 absolute.
pub fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return (x.to_u64().expect("fits u64") as f64).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("64 bits");
    (top as f64).log2() + shift as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_traits::One;

    #[test]
    fn two_term_lse() {
        assert!((log2_add_exp2(-1.0, -1.0) - 0.0).abs() < 1e-15);
        assert_eq!(log2_add_exp2(f64::NEG_INFINITY, -3.0), -3.0);
        // 2^-1 + 2^-2 = 0.75
        assert!((log2_add_exp2(-1.0, -2.0) - 0.75f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn accumulator_matches_direct_sum() {
        let terms: Vec<f64> = (0..1000).map(|i| -(i as f64) * 0.037 - 1.0).collect();
        let direct: f64 = terms.iter().map(|&l| l.exp2()).sum();
        let acc = log2_sum_exp2(&terms);
        assert!((acc - direct.log2()).abs() < 1e-12);
    }

    #[test]
    fn accumulator_handles_extreme_ranges() {
        // Terms around 2^-5000 must not underflow.
        let terms = [-5000.0, -5001.0, -5000.5];
        let got = log2_sum_exp2(&terms);
        let want = -5000.0 + (1.0f64 + (-1.0f64).exp2() + (-0.5f64).exp2()).log2();
        assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
    }

    #[test]
    fn accumulator_handles_growth_across_anchor() {
        // Push terms in increasing magnitude so the anchor must rebase.
        let terms = [0.0, 600.0, 1300.0];
        let got = log2_sum_exp2(&terms);
        assert!((got - 1300.0).abs() < 1e-9);
    }

    #[test]
    fn log2_of_big_integers() {
        assert_eq!(log2_biguint(&BigUint::one()), 0.0);
        assert_eq!(log2_biguint(&BigUint::from(1024u32)), 10.0);
        let big = BigUint::one() << 4000u32;
        assert!((log2_biguint(&big) - 4000.0).abs() < 1e-9);
        let big3 = BigUint::from(3u8).pow(500);
        assert!((log2_biguint(&big3) - 500.0 * 3f64.log2()).abs() < 1e-8);
    }
}
