//! Seeded, replayable simulations of the guessing algorithms.
//!
//! Single-key guessing enumerates keys in rank order until the oracle hits;
//! the simulators replace that literal loop with rank arithmetic, which is
//! exact because the loop stops at the key's rank by construction. The
//! literal-loop implementations are kept for small instances as a
//! verification path.
//!
//! The multi-key drivers follow the doubling schedule exactly as written:
//! every phase reruns the aborted guesser from scratch on every key (keys
//! already recovered included) and is charged m·t oracle calls classically,
//! m·grover_queries(t) quantumly. The obvious skip-the-found optimization is
//! opt-in and changes costs, never outcomes.
//!
//! RNG contract: ChaCha8 seeded with the configured 64-bit seed, one stream
//! per sampled key (stream id = key index), so per-key sampling is
//! order-independent and parallelizable. Identical config ⇒ bit-identical
//! outcome.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cost::grover_queries;
use crate::dist::{AtomDistribution, ProductDistribution};
use crate::error::{Error, Result};
use crate::logdomain::NeumaierSum;
use crate::rank::{core_set_threshold_log2, membership_epsilon, RankTable};

/// z for the 95% Wilson interval.
const WILSON_Z: f64 = 1.959963984540054;

#[derive(Clone, Debug, Serialize)]
pub struct SimConfig {
    pub seed: u64,
    /// Number of independently sampled keys.
    pub m: u64,
    /// Target fraction of keys to recover, strictly inside (0, 1).
    pub c: f64,
    /// Cap on the doubling schedule; defaults to ⌈log2|K|⌉ + 1, after which
    /// failure is impossible for c < 1.
    pub max_doublings: Option<u32>,
}

impl SimConfig {
    pub fn new(seed: u64, m: u64, c: f64) -> Self {
        Self {
            seed,
            m,
            c,
            max_doublings: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(Error::InvalidParameter {
                name: "c",
                value: self.c,
                constraint: "0 < c < 1",
            });
        }
        if self.m < 1 {
            return Err(Error::InvalidParameter {
                name: "m",
                value: self.m as f64,
                constraint: "m >= 1",
            });
        }
        Ok(())
    }
}

/// One doubling phase of the multi-key schedule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhaseTrace {
    /// log2 of the abort budget t for this phase.
    pub alpha: u32,
    /// Keys with rank ≤ t after this phase.
    pub recovered: u64,
    #[serde(with = "biguint_decimal")]
    pub queries_charged: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimOutcome {
    pub seed: u64,
    /// Exact sum of per-phase charges.
    #[serde(with = "biguint_decimal")]
    pub queries_total: BigUint,
    /// Keys recovered at termination.
    pub recovered: u64,
    /// log2 of the final abort budget.
    pub alpha_max: u32,
    /// Realized oracle calls per key (min(rank, t) per classical phase run,
    /// the full Grover charge per quantum phase run). The charging contract
    /// behind `queries_total` is the per-phase m·t / m·grover(t) model.
    #[serde(serialize_with = "biguint_decimal::vec_opt")]
    pub per_key_costs: Option<Vec<BigUint>>,
    pub phases: Vec<PhaseTrace>,
}

mod biguint_decimal {
    use num_bigint::BigUint;
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn vec_opt<S: Serializer>(
        v: &Option<Vec<BigUint>>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match v {
            None => s.serialize_none(),
            Some(list) => {
                let mut seq = s.serialize_seq(Some(list.len()))?;
                for item in list {
                    seq.serialize_element(&item.to_string())?;
                }
                seq.end()
            }
        }
    }
}

/// RNG for the index-th sampled key: shared seed, per-key stream.
pub fn rng_for_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Inverse-CDF sampler over an atom's support.
pub struct AtomSampler {
    cum: Vec<f64>,
}

impl AtomSampler {
    pub fn new(atom: &AtomDistribution) -> Self {
        let mut cum = Vec::with_capacity(atom.len());
        let mut acc = NeumaierSum::new();
        for lp in atom.log2_probs() {
            acc.add(lp.exp2());
            cum.push(acc.total());
        }
        Self { cum }
    }

    pub fn sample_index(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.gen();
        self.cum
            .partition_point(|&c| c <= u)
            .min(self.cum.len() - 1)
    }
}

/// Sample one key of χ^n from the given per-key stream.
pub fn sample_key(atom: &AtomDistribution, n: u32, seed: u64, index: u64) -> Vec<i64> {
    let sampler = AtomSampler::new(atom);
    let mut rng = rng_for_stream(seed, index);
    (0..n)
        .map(|_| atom.support()[sampler.sample_index(&mut rng)])
        .collect()
}

/// KeyGuess: oracle queries spent finding k by enumerating in rank order.
/// Equal to rank(k) — the enumeration stops exactly there.
pub fn key_guess(tbl: &RankTable, key: &[i64]) -> Result<BigUint> {
    tbl.rank_of_key(key)
}

/// Literal-loop KeyGuess: actually walks get_key(1), get_key(2), ... and
/// compares. Verification path for small instances.
pub fn key_guess_literal(tbl: &RankTable, key: &[i64]) -> Result<BigUint> {
    let mut i = BigUint::one();
    loop {
        if tbl.get_key(&i)? == key {
            return Ok(i);
        }
        if &i == tbl.key_count() {
            return Err(Error::SymbolNotInSupport(key[0]));
        }
        i += 1u32;
    }
}

/// AbortedKeyGuess: stops after t trials. Returns (queries, found);
/// queries = min(rank, t), found ⇔ rank ≤ t.
pub fn aborted_key_guess(tbl: &RankTable, key: &[i64], t: &BigUint) -> Result<(BigUint, bool)> {
    if t.is_zero() {
        return Err(Error::InvalidParameter {
            name: "t",
            value: 0.0,
            constraint: "t >= 1",
        });
    }
    let rank = tbl.rank_of_key(key)?;
    if rank <= *t {
        Ok((rank, true))
    } else {
        Ok((t.clone(), false))
    }
}

/// Literal-loop AbortedKeyGuess for cross-checking the shortcut.
pub fn aborted_key_guess_literal(
    tbl: &RankTable,
    key: &[i64],
    t: &BigUint,
) -> Result<(BigUint, bool)> {
    if t.is_zero() {
        return Err(Error::InvalidParameter {
            name: "t",
            value: 0.0,
            constraint: "t >= 1",
        });
    }
    let mut i = BigUint::one();
    let mut queries = BigUint::zero();
    loop {
        if i > *t || i > *tbl.key_count() {
            return Ok((queries, false));
        }
        queries += 1u32;
        if tbl.get_key(&i)? == key {
            return Ok((queries, true));
        }
        i += 1u32;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CostModel {
    Classical,
    Quantum,
}

/// MultiKeyGuess: doubling schedule with full-cost per-phase charging.
pub fn multi_key_guess(tbl: &RankTable, cfg: &SimConfig) -> Result<SimOutcome> {
    run_multi(tbl, cfg, CostModel::Classical, false)
}

/// QuantumMultiKeyGuess: identical control flow and success model; each
/// per-key phase is charged grover_queries(t) instead of t.
pub fn quantum_multi_key_guess(tbl: &RankTable, cfg: &SimConfig) -> Result<SimOutcome> {
    run_multi(tbl, cfg, CostModel::Quantum, false)
}

/// The opt-in variant that skips keys already recovered in earlier phases.
/// Costs change; the recovered set and alpha_max do not.
pub fn multi_key_guess_skipping_found(
    tbl: &RankTable,
    cfg: &SimConfig,
    quantum: bool,
) -> Result<SimOutcome> {
    let model = if quantum {
        CostModel::Quantum
    } else {
        CostModel::Classical
    };
    run_multi(tbl, cfg, model, true)
}

fn run_multi(
    tbl: &RankTable,
    cfg: &SimConfig,
    model: CostModel,
    skip_found: bool,
) -> Result<SimOutcome> {
    cfg.validate()?;
    let atom = tbl.atom();
    let sampler = AtomSampler::new(atom);
    let n = tbl.n();
    let m = cfg.m;

    let mut ranks = Vec::with_capacity(m as usize);
    for j in 0..m {
        let mut rng = rng_for_stream(cfg.seed, j);
        let key: Vec<i64> = (0..n)
            .map(|_| atom.support()[sampler.sample_index(&mut rng)])
            .collect();
        ranks.push(tbl.rank_of_key(&key)?);
    }

    // ⌈c·m⌉, guarding against decimal parameters that round just above k/m.
    let needed = ((cfg.c * m as f64) - 1e-9).ceil().max(1.0) as u64;
    let cap = cfg.max_doublings.unwrap_or_else(|| {
        let bits = tbl.key_count().bits();
        let ceil_log2 = if tbl.key_count().count_ones() == 1 {
            bits - 1
        } else {
            bits
        } as u32;
        ceil_log2 + 1
    });

    let mut queries_total = BigUint::zero();
    let mut per_key = vec![BigUint::zero(); m as usize];
    let mut found = vec![false; m as usize];
    let mut phases = Vec::new();
    let mut alpha = 0u32;
    loop {
        alpha += 1;
        if alpha > cap {
            return Err(Error::MaxDoublingsExceeded(cap));
        }
        let t = BigUint::one() << alpha;
        let per_key_charge = match model {
            CostModel::Classical => t.clone(),
            CostModel::Quantum => grover_queries(&t)?,
        };
        let mut phase_charge = BigUint::zero();
        let mut recovered = 0u64;
        for j in 0..m as usize {
            if skip_found && found[j] {
                recovered += 1;
                continue;
            }
            phase_charge += &per_key_charge;
            let realized = match model {
                CostModel::Classical => ranks[j].clone().min(t.clone()),
                CostModel::Quantum => per_key_charge.clone(),
            };
            per_key[j] += realized;
            if ranks[j] <= t {
                found[j] = true;
                recovered += 1;
            }
        }
        queries_total += &phase_charge;
        phases.push(PhaseTrace {
            alpha,
            recovered,
            queries_charged: phase_charge,
        });
        if recovered >= needed {
            return Ok(SimOutcome {
                seed: cfg.seed,
                queries_total,
                recovered,
                alpha_max: alpha,
                per_key_costs: Some(per_key),
                phases,
            });
        }
    }
}

/// Monte Carlo estimate of Pr[key ∈ core set] with a 95% Wilson interval.
#[derive(Clone, Debug, Serialize)]
pub struct MassEstimate {
    pub trials: u64,
    pub hits: u64,
    pub fraction: f64,
    pub wilson_lower: f64,
    pub wilson_upper: f64,
    pub delta: f64,
    pub threshold_log2: f64,
}

/// Sample keys from χ^n and test P(key) ≥ 2^(-H(χ)n - δn) in the log domain.
pub fn core_set_mass_estimate(
    d: &ProductDistribution,
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<MassEstimate> {
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: delta,
            constraint: "delta >= 0",
        });
    }
    if trials < 1 {
        return Err(Error::InvalidParameter {
            name: "trials",
            value: trials as f64,
            constraint: "trials >= 1",
        });
    }
    let atom = d.atom();
    let sampler = AtomSampler::new(atom);
    let threshold = core_set_threshold_log2(d, delta);
    let eps = membership_epsilon(threshold);
    let lps = atom.log2_probs();
    let mut hits = 0u64;
    for j in 0..trials {
        let mut rng = rng_for_stream(seed, j);
        let mut counts = vec![0u32; atom.len()];
        for _ in 0..d.n() {
            counts[sampler.sample_index(&mut rng)] += 1;
        }
        let mut lp = 0.0;
        for (a, &c) in counts.iter().enumerate() {
            if c > 0 {
                lp += c as f64 * lps[a];
            }
        }
        if lp >= threshold - eps {
            hits += 1;
        }
    }
    let (fraction, wilson_lower, wilson_upper) = wilson_interval(hits, trials, WILSON_Z);
    Ok(MassEstimate {
        trials,
        hits,
        fraction,
        wilson_lower,
        wilson_upper,
        delta,
        threshold_log2: threshold,
    })
}

/// δ such that Hoeffding's inequality gives Pr[key ∈ core set] ≥ 1 - ε:
/// δ = R·√(ln(1/ε) / (2n)), R the spread of the per-symbol surprisal.
pub fn hoeffding_delta(atom: &AtomDistribution, n: u32, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: epsilon,
            constraint: "0 < epsilon < 1",
        });
    }
    let lps = atom.log2_probs();
    let max = lps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = lps.iter().cloned().fold(f64::INFINITY, f64::min);
    let range = max - min;
    Ok(range * ((1.0 / epsilon).ln() / (2.0 * n as f64)).sqrt())
}

fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64, f64) {
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    (p, (center - half).max(0.0), (center + half).min(1.0))
}
