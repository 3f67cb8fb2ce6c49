//! Rank ↔ key conversion over product distributions.
//!
//! Keys of χ^n sharing a symbol-multiplicity vector (a type class) are
//! equiprobable, so the decreasing-probability order of the whole key space
//! is: type classes sorted by descending class probability, keys inside a
//! class in a fixed conventional order. After enumerating the
//! C(n+|A|-1, |A|-1) classes once, any rank maps to its key (and back) in
//! O(|A|·n) big-integer operations via multiset-permutation unranking.
//!
//! Tie-break convention (the paper-level order does not specify one):
//! classes of equal probability are ordered by lexicographically smaller
//! counts vector first; keys within a class are in lexicographic symbol
//! order. Equal probability is decided exactly on the rational mass view
//! when the atom carries one, and by a 2^-30 log-domain band otherwise.

mod cache;

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, ToPrimitive, Zero};
use std::cmp::Ordering;

use crate::dist::{log2_prob_from_counts, AtomDistribution, ExactMasses, ProductDistribution};
use crate::error::{Error, Result};
use crate::logdomain::{log2_add_exp2, log2_biguint, Log2Accumulator};

/// Default cap on the number of type classes a table may hold.
pub const DEFAULT_CLASS_BUDGET: u64 = 100_000_000;

/// Two classes whose f64 log-probabilities differ by more than this are
/// ordered by f64 alone; closer pairs go through the exact comparison.
const EXACT_GUARD_BITS: f64 = 9.5367431640625e-7; // 2^-20

/// Tie band for atoms without an exact mass view.
const TIE_BAND_BITS: f64 = 9.313225746154785e-10; // 2^-30

/// One type class: every key with this multiplicity vector has the same
/// probability.
#[derive(Clone, Debug)]
pub struct TypeClass {
    counts: Vec<u32>,
    log2_prob: f64,
    cardinality: BigUint,
}

impl TypeClass {
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn log2_prob(&self) -> f64 {
        self.log2_prob
    }

    pub fn cardinality(&self) -> &BigUint {
        &self.cardinality
    }
}

/// Precomputed decreasing-probability order of A^n.
#[derive(Clone, Debug)]
pub struct RankTable {
    atom: AtomDistribution,
    n: u32,
    classes: Vec<TypeClass>,
    cum_counts: Vec<BigUint>,
    cum_log2_mass: Vec<f64>,
    /// Class positions sorted by counts vector, for O(log) class lookup.
    counts_order: Vec<u32>,
    key_count: BigUint,
}

/// Number of type classes of (|A|, n): C(n + |A| - 1, |A| - 1).
pub fn class_count(support_size: usize, n: u32) -> BigUint {
    binomial(
        BigUint::from(n as u64 + support_size as u64 - 1),
        BigUint::from(support_size as u64 - 1),
    )
}

impl RankTable {
    pub fn build(d: &ProductDistribution) -> Result<Self> {
        Self::build_with_budget(d, DEFAULT_CLASS_BUDGET)
    }

    pub fn build_with_budget(d: &ProductDistribution, budget: u64) -> Result<Self> {
        let atom = d.atom().clone();
        let n = d.n();
        let expected = class_count(atom.len(), n);
        if expected > BigUint::from(budget) {
            return Err(Error::ClassBudgetExceeded {
                classes: expected,
                budget,
            });
        }
        let expected = expected.to_usize().expect("within budget");
        if expected > u32::MAX as usize {
            return Err(Error::ClassBudgetExceeded {
                classes: BigUint::from(expected),
                budget: u32::MAX as u64,
            });
        }

        let factorials = factorial_table(n);
        let mut classes = Vec::with_capacity(expected);
        let mut counts = vec![0u32; atom.len()];
        enumerate_compositions(n, atom.len(), &mut counts, 0, &mut |c| {
            classes.push(TypeClass {
                counts: c.to_vec(),
                log2_prob: log2_prob_from_counts(&atom, c),
                cardinality: multinomial(&factorials, n, c),
            });
        });
        debug_assert_eq!(classes.len(), expected);

        sort_classes(&mut classes, atom.exact_masses());

        let mut cum_counts = Vec::with_capacity(classes.len());
        let mut cum_log2_mass = Vec::with_capacity(classes.len());
        let mut running = BigUint::zero();
        let mut mass = Log2Accumulator::new();
        for class in &classes {
            running += &class.cardinality;
            cum_counts.push(running.clone());
            mass.push(log2_biguint(&class.cardinality) + class.log2_prob);
            cum_log2_mass.push(mass.log2_total());
        }
        let key_count = d.key_count();
        assert_eq!(
            cum_counts.last(),
            Some(&key_count),
            "class cardinalities must partition the key space"
        );

        let mut counts_order: Vec<u32> = (0..classes.len() as u32).collect();
        counts_order.sort_by(|&a, &b| classes[a as usize].counts.cmp(&classes[b as usize].counts));

        Ok(Self {
            atom,
            n,
            classes,
            cum_counts,
            cum_log2_mass,
            counts_order,
            key_count,
        })
    }

    pub fn atom(&self) -> &AtomDistribution {
        &self.atom
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn classes(&self) -> &[TypeClass] {
        &self.classes
    }

    pub fn cum_counts(&self) -> &[BigUint] {
        &self.cum_counts
    }

    pub fn key_count(&self) -> &BigUint {
        &self.key_count
    }

    /// log2 of the total accumulated mass; 0 within 2^-35 by construction.
    pub fn log2_total_mass(&self) -> f64 {
        *self.cum_log2_mass.last().expect("non-empty")
    }

    /// The i-th most likely key, 1-based.
    pub fn get_key(&self, rank: &BigUint) -> Result<Vec<i64>> {
        self.get_key_with_ops(rank).map(|(key, _)| key)
    }

    /// `get_key` plus the number of big-integer operations performed, for
    /// the O(|A|·n) per-query cost contract.
    pub fn get_key_with_ops(&self, rank: &BigUint) -> Result<(Vec<i64>, u64)> {
        if rank.is_zero() || rank > &self.key_count {
            return Err(Error::RankOutOfRange {
                rank: rank.clone(),
                key_count: self.key_count.clone(),
            });
        }
        let mut ops = 0u64;
        let pos = partition_point_counted(&self.cum_counts, rank, &mut ops);
        let block_start = if pos == 0 {
            BigUint::zero()
        } else {
            self.cum_counts[pos - 1].clone()
        };
        let offset = rank - &block_start - 1u32;
        ops += 1;
        let key = self.unrank_in_class(&self.classes[pos], offset, &mut ops);
        Ok((key, ops))
    }

    /// Exact inverse of `get_key`.
    pub fn rank_of_key(&self, key: &[i64]) -> Result<BigUint> {
        self.rank_of_key_with_ops(key).map(|(rank, _)| rank)
    }

    pub fn rank_of_key_with_ops(&self, key: &[i64]) -> Result<(BigUint, u64)> {
        if key.len() != self.n as usize {
            return Err(Error::KeyLengthMismatch {
                got: key.len(),
                expected: self.n as usize,
            });
        }
        let mut indices = Vec::with_capacity(key.len());
        let mut counts = vec![0u32; self.atom.len()];
        for &sym in key {
            let idx = self
                .atom
                .index_of_label(sym)
                .ok_or(Error::SymbolNotInSupport(sym))?;
            counts[idx] += 1;
            indices.push(idx);
        }
        let mut ops = 0u64;
        let pos = self
            .class_position(&counts)
            .expect("every multiplicity vector is a class");
        ops += (self.counts_order.len().max(2) as f64).log2().ceil() as u64;
        let block_start = if pos == 0 {
            BigUint::zero()
        } else {
            self.cum_counts[pos - 1].clone()
        };
        let within = self.rank_in_class(&self.classes[pos], &indices, &mut ops);
        Ok((block_start + within + 1u32, ops))
    }

    /// log2 of the probability mass of the `count` most likely keys.
    pub fn cumulative_log2_mass(&self, count: &BigUint) -> Result<f64> {
        if count > &self.key_count {
            return Err(Error::CountOutOfRange {
                count: count.clone(),
                key_count: self.key_count.clone(),
            });
        }
        if count.is_zero() {
            return Ok(f64::NEG_INFINITY);
        }
        let pos = self.cum_counts.partition_point(|c| c < count);
        if &self.cum_counts[pos] == count {
            return Ok(self.cum_log2_mass[pos]);
        }
        let block_start = if pos == 0 {
            BigUint::zero()
        } else {
            self.cum_counts[pos - 1].clone()
        };
        let full = if pos == 0 {
            f64::NEG_INFINITY
        } else {
            self.cum_log2_mass[pos - 1]
        };
        let partial = count - &block_start;
        Ok(log2_add_exp2(
            full,
            log2_biguint(&partial) + self.classes[pos].log2_prob,
        ))
    }

    /// Position (in probability order) of the class with this multiplicity
    /// vector.
    fn class_position(&self, counts: &[u32]) -> Option<usize> {
        self.counts_order
            .binary_search_by(|&idx| self.classes[idx as usize].counts.as_slice().cmp(counts))
            .ok()
            .map(|found| self.counts_order[found] as usize)
    }

    fn unrank_in_class(&self, class: &TypeClass, mut offset: BigUint, ops: &mut u64) -> Vec<i64> {
        let support = self.atom.support();
        let mut counts = class.counts.clone();
        let mut completions = class.cardinality.clone();
        let mut remaining = self.n;
        let mut key = Vec::with_capacity(self.n as usize);
        for _ in 0..self.n {
            for a in 0..counts.len() {
                if counts[a] == 0 {
                    continue;
                }
                // completions after fixing symbol a here:
                // multinomial(remaining-1; counts - e_a) = completions·c_a/remaining
                let with_a = (&completions * counts[a]) / remaining;
                *ops += 2;
                if offset < with_a {
                    *ops += 1;
                    key.push(support[a]);
                    counts[a] -= 1;
                    completions = with_a;
                    break;
                }
                offset -= &with_a;
                *ops += 2;
            }
            remaining -= 1;
        }
        debug_assert!(offset.is_zero());
        key
    }

    fn rank_in_class(&self, class: &TypeClass, indices: &[usize], ops: &mut u64) -> BigUint {
        let mut counts = class.counts.clone();
        let mut completions = class.cardinality.clone();
        let mut remaining = self.n;
        let mut rank = BigUint::zero();
        for &sym in indices {
            for a in 0..sym {
                if counts[a] > 0 {
                    rank += (&completions * counts[a]) / remaining;
                    *ops += 3;
                }
            }
            completions = (&completions * counts[sym]) / remaining;
            *ops += 2;
            counts[sym] -= 1;
            remaining -= 1;
        }
        rank
    }
}

/// Binary search returning the first index whose cumulative count is >= rank,
/// counting big-integer comparisons.
fn partition_point_counted(cum: &[BigUint], rank: &BigUint, ops: &mut u64) -> usize {
    let mut lo = 0usize;
    let mut hi = cum.len();
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        *ops += 1;
        if &cum[mid] < rank {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

fn factorial_table(n: u32) -> Vec<BigUint> {
    let mut fact = Vec::with_capacity(n as usize + 1);
    fact.push(BigUint::one());
    for i in 1..=n {
        let next = fact.last().unwrap() * i;
        fact.push(next);
    }
    fact
}

fn multinomial(factorials: &[BigUint], n: u32, counts: &[u32]) -> BigUint {
    let mut result = factorials[n as usize].clone();
    for &c in counts {
        if c > 1 {
            result /= &factorials[c as usize];
        }
    }
    result
}

fn enumerate_compositions(
    remaining: u32,
    parts: usize,
    counts: &mut [u32],
    idx: usize,
    visit: &mut impl FnMut(&[u32]),
) {
    if idx == parts - 1 {
        counts[idx] = remaining;
        visit(counts);
        return;
    }
    for v in 0..=remaining {
        counts[idx] = v;
        enumerate_compositions(remaining - v, parts, counts, idx + 1, visit);
    }
}

/// Exact comparison of class probabilities Π mass_a^{counts_a} on the shared
/// denominator: only numerator products matter, and only where counts differ.
fn cmp_class_probs_exact(masses: &ExactMasses, a: &[u32], b: &[u32]) -> Ordering {
    let mut lhs = BigUint::one();
    let mut rhs = BigUint::one();
    for i in 0..a.len() {
        match a[i].cmp(&b[i]) {
            Ordering::Greater => lhs *= masses.numerators[i].pow(a[i] - b[i]),
            Ordering::Less => rhs *= masses.numerators[i].pow(b[i] - a[i]),
            Ordering::Equal => {}
        }
    }
    lhs.cmp(&rhs)
}

/// Sort classes by descending probability with the documented tie-break.
/// First pass orders by f64 log-probability; a second pass re-resolves runs
/// of near-equal classes, exactly when the mass view exists and by treating
/// the run as tied otherwise.
fn sort_classes(classes: &mut [TypeClass], masses: Option<&ExactMasses>) {
    classes.sort_by(|x, y| {
        y.log2_prob
            .partial_cmp(&x.log2_prob)
            .expect("log-probabilities are finite")
            .then_with(|| x.counts.cmp(&y.counts))
    });
    let band = if masses.is_some() {
        EXACT_GUARD_BITS
    } else {
        TIE_BAND_BITS
    };
    let mut start = 0;
    while start < classes.len() {
        let mut end = start + 1;
        while end < classes.len() && classes[end - 1].log2_prob - classes[end].log2_prob <= band {
            end += 1;
        }
        if end - start > 1 {
            match masses {
                Some(m) => classes[start..end].sort_by(|x, y| {
                    cmp_class_probs_exact(m, &x.counts, &y.counts)
                        .reverse()
                        .then_with(|| x.counts.cmp(&y.counts))
                }),
                None => classes[start..end].sort_by(|x, y| x.counts.cmp(&y.counts)),
            }
        }
        start = end;
    }
}

pub use core_set::{core_set_size, core_set_threshold_log2, membership_epsilon};

mod core_set {
    use super::*;
    use crate::dist::EntropyFamily;

    /// Membership guard: the f64 fold that evaluates class probabilities can
    /// drift by a few hundred ulps at n in the hundreds, so membership is
    /// decided against threshold - epsilon. Callers asserting the core-set
    /// size bound must widen the bound by the same epsilon.
    pub fn membership_epsilon(threshold_log2: f64) -> f64 {
        2f64.powi(-30) * threshold_log2.abs().max(1.0)
    }

    /// log2 of the core-set probability threshold 2^(-H(χ)n - δn).
    pub fn core_set_threshold_log2(d: &ProductDistribution, delta: f64) -> f64 {
        -(d.atom().shannon_entropy() + delta) * d.n() as f64
    }

    /// Number of keys with P(key) >= 2^(-H(χ)n - δn), as an exact integer.
    pub fn core_set_size(d: &ProductDistribution, delta: f64) -> Result<BigUint> {
        if !(delta >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "delta",
                value: delta,
                constraint: "delta >= 0",
            });
        }
        let threshold = core_set_threshold_log2(d, delta);
        let eps = membership_epsilon(threshold);
        let atom = d.atom();
        let n = d.n();
        let factorials = factorial_table(n);
        let mut size = BigUint::zero();
        let mut counts = vec![0u32; atom.len()];
        enumerate_compositions(n, atom.len(), &mut counts, 0, &mut |c| {
            if log2_prob_from_counts(atom, c) >= threshold - eps {
                size += multinomial(&factorials, n, c);
            }
        });
        Ok(size)
    }
}

#[cfg(test)]
mod tests;
