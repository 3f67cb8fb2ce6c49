use super::*;
use crate::dist::{make_bernoulli, make_geometric, make_ternary, make_uniform};
use num_traits::ToPrimitive;

fn product(atom: AtomDistribution, n: u32) -> ProductDistribution {
    ProductDistribution::new(atom, n).unwrap()
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

#[test]
fn bernoulli_squared_class_order() {
    let d = product(make_bernoulli(0.25).unwrap(), 2);
    let tbl = RankTable::build(&d).unwrap();
    let classes = tbl.classes();
    assert_eq!(classes.len(), 3);
    // (0,0) with p = 0.5625, then the mixed class, then (1,1)
    assert_eq!(classes[0].counts(), &[2, 0]);
    assert!((classes[0].log2_prob() - 0.5625f64.log2()).abs() < 1e-12);
    assert_eq!(classes[0].cardinality(), &big(1));
    assert_eq!(classes[1].counts(), &[1, 1]);
    assert!((classes[1].log2_prob() - 0.1875f64.log2()).abs() < 1e-12);
    assert_eq!(classes[1].cardinality(), &big(2));
    assert_eq!(classes[2].counts(), &[0, 2]);
    assert!((classes[2].log2_prob() - 0.0625f64.log2()).abs() < 1e-12);
}

#[test]
fn bernoulli_squared_get_key() {
    let d = product(make_bernoulli(0.25).unwrap(), 2);
    let tbl = RankTable::build(&d).unwrap();
    assert_eq!(tbl.get_key(&big(1)).unwrap(), vec![0, 0]);
    assert_eq!(tbl.get_key(&big(2)).unwrap(), vec![0, 1]); // lexicographic within class
    assert_eq!(tbl.get_key(&big(3)).unwrap(), vec![1, 0]);
    assert_eq!(tbl.get_key(&big(4)).unwrap(), vec![1, 1]);
    assert_eq!(tbl.rank_of_key(&[0, 0]).unwrap(), big(1));
    assert_eq!(tbl.rank_of_key(&[1, 0]).unwrap(), big(3));
}

#[test]
fn rank_bounds_are_enforced() {
    let d = product(make_bernoulli(0.25).unwrap(), 2);
    let tbl = RankTable::build(&d).unwrap();
    assert!(matches!(
        tbl.get_key(&BigUint::zero()),
        Err(Error::RankOutOfRange { .. })
    ));
    assert!(tbl.get_key(&big(5)).is_err());
    assert!(matches!(
        tbl.rank_of_key(&[0, 9]),
        Err(Error::SymbolNotInSupport(9))
    ));
    assert!(tbl.rank_of_key(&[0]).is_err());
}

#[test]
fn bernoulli_p02_n16_prefix_counts() {
    let d = product(make_bernoulli(0.2).unwrap(), 16);
    let tbl = RankTable::build(&d).unwrap();
    assert_eq!(tbl.classes().len(), 17);
    let prefix: Vec<u64> = tbl
        .cum_counts()
        .iter()
        .take(6)
        .map(|c| c.to_u64().unwrap())
        .collect();
    assert_eq!(prefix, vec![1, 17, 137, 697, 2517, 6885]);
}

#[test]
fn class_count_formula() {
    assert_eq!(class_count(2, 16), big(17));
    assert_eq!(class_count(3, 4), big(15));
    assert_eq!(class_count(1, 7), big(1));
}

#[test]
fn budget_is_a_hard_cap() {
    let d = product(make_ternary(0.375).unwrap(), 64);
    match RankTable::build_with_budget(&d, 100) {
        Err(Error::ClassBudgetExceeded { classes, budget }) => {
            assert_eq!(budget, 100);
            assert_eq!(classes, big(66 * 65 / 2));
        }
        other => panic!("expected budget error, got {other:?}"),
    }
}

#[test]
fn single_symbol_support() {
    let d = product(make_uniform(1).unwrap(), 5);
    let tbl = RankTable::build(&d).unwrap();
    assert_eq!(tbl.key_count(), &big(1));
    assert_eq!(tbl.get_key(&big(1)).unwrap(), vec![0, 0, 0, 0, 0]);
    assert_eq!(tbl.rank_of_key(&[0, 0, 0, 0, 0]).unwrap(), big(1));
}

#[test]
fn uniform_ties_order_by_counts_vector() {
    let d = product(make_uniform(2).unwrap(), 3);
    let tbl = RankTable::build(&d).unwrap();
    // all classes tie at p = 1/8; order is counts-lex: (0,3) < (1,2) < (2,1) < (3,0)
    let counts: Vec<&[u32]> = tbl.classes().iter().map(|c| c.counts()).collect();
    assert_eq!(counts, vec![&[0, 3][..], &[1, 2], &[2, 1], &[3, 0]]);
    // within-class lexicographic symbol order
    assert_eq!(tbl.get_key(&big(1)).unwrap(), vec![1, 1, 1]);
    assert_eq!(tbl.get_key(&big(2)).unwrap(), vec![0, 1, 1]);
    assert_eq!(tbl.get_key(&big(3)).unwrap(), vec![1, 0, 1]);
    assert_eq!(tbl.get_key(&big(4)).unwrap(), vec![1, 1, 0]);
}

#[test]
fn exact_cross_class_ties_order_by_counts_vector() {
    // masses (1,2,2,1)/6: class probability is 2^(c_1+c_2)/6^n, so classes
    // tie exactly whenever c_1+c_2 agrees; the exact comparator must order
    // every tie group by ascending counts vector.
    let atom = AtomDistribution::from_exact_masses(
        vec![0, 1, 2, 3],
        vec![1u32.into(), 2u32.into(), 2u32.into(), 1u32.into()],
    )
    .unwrap();
    let d = product(atom, 4);
    let tbl = RankTable::build(&d).unwrap();
    for w in tbl.classes().windows(2) {
        let gap = w[0].log2_prob() - w[1].log2_prob();
        assert!(gap >= -1e-12, "classes out of order");
        if gap.abs() < 0.5 {
            // exact tie group
            assert!(w[0].counts() < w[1].counts(), "{:?} vs {:?}", w[0], w[1]);
        }
    }
    roundtrip_all(&tbl);
}

#[test]
fn band_tie_break_is_deterministic_without_masses() {
    // geometric atoms lose the exact view; morally-tied classes fall in the
    // 2^-30 band and must come out in counts order
    let d = product(make_geometric(3, 0.4).unwrap(), 4);
    let tbl = RankTable::build(&d).unwrap();
    assert!(tbl.atom().exact_masses().is_none());
    for w in tbl.classes().windows(2) {
        let gap = w[0].log2_prob() - w[1].log2_prob();
        assert!(gap >= -1e-9, "classes out of order");
        if gap.abs() <= 2f64.powi(-30) {
            assert!(w[0].counts() < w[1].counts());
        }
    }
    roundtrip_all(&tbl);
}

#[test]
fn full_roundtrip_small_instances() {
    for (atom, n) in [
        (make_bernoulli(0.25).unwrap(), 6u32),
        (make_ternary(0.375).unwrap(), 4),
        (make_uniform(4).unwrap(), 3),
    ] {
        let tbl = RankTable::build(&product(atom, n)).unwrap();
        roundtrip_all(&tbl);
    }
}

fn roundtrip_all(tbl: &RankTable) {
    let total = tbl.key_count().to_u64().expect("small instance");
    let mut prev_lp = f64::INFINITY;
    for i in 1..=total {
        let rank = big(i);
        let key = tbl.get_key(&rank).unwrap();
        assert_eq!(tbl.rank_of_key(&key).unwrap(), rank, "rank {i}");
        let lp: f64 = key
            .iter()
            .map(|&s| tbl.atom().log2_probs()[tbl.atom().index_of_label(s).unwrap()])
            .sum();
        assert!(lp <= prev_lp + 1e-9, "monotonicity at rank {i}");
        prev_lp = lp;
    }
}

#[test]
fn random_rank_roundtrip_on_large_space() {
    use rand::{Rng, SeedableRng};
    let d = product(make_bernoulli(0.2).unwrap(), 64);
    let tbl = RankTable::build(&d).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let rank = big(rng.gen::<u64>()) + 1u32; // uniform over [1, 2^64] = [1, |K|]
        let key = tbl.get_key(&rank).unwrap();
        assert_eq!(tbl.rank_of_key(&key).unwrap(), rank);
    }
}

#[test]
fn cumulative_mass_matches_brute_force() {
    let d = product(make_bernoulli(0.2).unwrap(), 16);
    let tbl = RankTable::build(&d).unwrap();
    // independent oracle: expand, sort descending, prefix-sum
    let mut lps = d.expand_log2_probs(1 << 20).unwrap();
    lps.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut acc = 0.0f64;
    let mut prefix = Vec::with_capacity(lps.len());
    for lp in &lps {
        acc += lp.exp2();
        prefix.push(acc);
    }
    for t in [1u64, 2, 100, 4096, 65535, 65536] {
        let got = tbl.cumulative_log2_mass(&big(t)).unwrap();
        let want = prefix[t as usize - 1].log2();
        assert!(
            (got - want).abs() < 1e-9,
            "t = {t}: got {got}, want {want}"
        );
    }
    // spec anchor: mass of the top 2^12 keys is about 0.841
    let m4096 = tbl.cumulative_log2_mass(&big(4096)).unwrap().exp2();
    assert!((m4096 - 0.841).abs() < 0.001, "mass(4096) = {m4096}");
    assert_eq!(
        tbl.cumulative_log2_mass(&BigUint::zero()).unwrap(),
        f64::NEG_INFINITY
    );
    // full mass is 1 within 2^-35
    assert!(tbl.cumulative_log2_mass(tbl.key_count()).unwrap().abs() < 2f64.powi(-35));
    assert!(tbl.cumulative_log2_mass(&(tbl.key_count() + 1u32)).is_err());
}

#[test]
fn total_mass_invariant() {
    for (atom, n) in [
        (make_bernoulli(0.2).unwrap(), 64u32),
        (make_ternary(0.375).unwrap(), 40),
        (make_geometric(8, 0.3).unwrap(), 10),
    ] {
        let tbl = RankTable::build(&product(atom, n)).unwrap();
        assert!(
            tbl.log2_total_mass().abs() < 2f64.powi(-35),
            "total mass drift {}",
            tbl.log2_total_mass()
        );
    }
}

#[test]
fn get_key_cost_is_linear_in_alphabet_times_n() {
    let d = product(make_ternary(0.375).unwrap(), 64);
    let tbl = RankTable::build(&d).unwrap();
    let budget = 8 * 3 * 64 + 2 * 16 + 16; // O(|A|·n) + binary search + slack
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let r: u128 = rng.gen::<u128>() % 3u128.pow(64);
        let rank = BigUint::from(r) + 1u32;
        let (key, ops) = tbl.get_key_with_ops(&rank).unwrap();
        assert!(ops <= budget, "ops = {ops} > budget {budget}");
        let (back, ops_inv) = tbl.rank_of_key_with_ops(&key).unwrap();
        assert_eq!(back, rank);
        assert!(ops_inv <= budget, "inverse ops = {ops_inv}");
    }
}

#[test]
fn core_set_uniform_contains_everything() {
    let d = product(make_uniform(3).unwrap(), 5);
    for delta in [0.0, 0.1, 2.0] {
        assert_eq!(core_set_size(&d, delta).unwrap(), big(243));
    }
}

#[test]
fn core_set_bernoulli_quarter_squared() {
    // threshold 2^(-2H) ≈ 0.3249; only (0,0) with p = 0.5625 qualifies
    let d = product(make_bernoulli(0.25).unwrap(), 2);
    assert_eq!(core_set_size(&d, 0.0).unwrap(), big(1));
    assert!(core_set_size(&d, -0.5).is_err());
}

#[test]
fn core_set_respects_lemma_five_bound() {
    // |C| ≤ 2^{H(χ)n + δn} for the membership threshold actually used
    let d = product(make_bernoulli(0.3).unwrap(), 32);
    for delta in [0.0, 0.05, 0.2] {
        let size = core_set_size(&d, delta).unwrap();
        let thr = core_set_threshold_log2(&d, delta);
        let bound_bits = -thr + membership_epsilon(thr);
        assert!(
            log2_biguint(&size) <= bound_bits,
            "delta {delta}: |C| = {size}"
        );
    }
}

#[test]
fn cache_roundtrip_preserves_queries() {
    let dir = std::env::temp_dir().join("guesswork-cache-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ber02n16.rankcache");
    let d = product(make_bernoulli(0.2).unwrap(), 16);
    let tbl = RankTable::build(&d).unwrap();
    tbl.write_cache(&path).unwrap();
    let loaded = RankTable::load_cache(&path).unwrap();
    assert!(loaded.same_instance(&d));
    for i in [1u64, 2, 17, 4096, 65536] {
        assert_eq!(tbl.get_key(&big(i)).unwrap(), loaded.get_key(&big(i)).unwrap());
    }
    let key = tbl.get_key(&big(12345)).unwrap();
    assert_eq!(loaded.rank_of_key(&key).unwrap(), big(12345));
    assert_eq!(
        tbl.cumulative_log2_mass(&big(4096)).unwrap(),
        loaded.cumulative_log2_mass(&big(4096)).unwrap()
    );
    // other instances must not match
    let other = product(make_bernoulli(0.25).unwrap(), 16);
    assert!(!loaded.same_instance(&other));

    // corrupted magic is rejected
    let bad = dir.join("bad.rankcache");
    std::fs::write(&bad, b"NOTACACHEFILE").unwrap();
    assert!(matches!(
        RankTable::load_cache(&bad),
        Err(Error::CacheFormat(_)) | Err(Error::Io(_))
    ));
    std::fs::remove_dir_all(&dir).ok();
}
