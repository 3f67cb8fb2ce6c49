use super::*;
use crate::dist::{
    make_bernoulli, make_binomial, make_discrete_gaussian, make_geometric, make_ternary,
    make_uniform, make_zipf, ZipfLaw,
};

fn product(atom: crate::dist::AtomDistribution, n: u32) -> ProductDistribution {
    ProductDistribution::new(atom, n).unwrap()
}

// Frozen oracle values (40-digit evaluation of the closed forms).
const T_Q_BER25_SQ: f64 = 1.2774245693641198;
const ARIKAN_UP_BER25_SQ: f64 = 1.7999372539059834;
const ARIKAN_LO_BER25_SQ: f64 = 0.2149747531848272;

#[test]
fn bruteforce_uniform_mean_rank() {
    let d = product(make_uniform(4).unwrap(), 1);
    let t = moment_bruteforce_product(&d, 1.0).unwrap();
    assert!((t - 2.5).abs() < 1e-12);
}

#[test]
fn bruteforce_bernoulli_quarter_squared() {
    let d = product(make_bernoulli(0.25).unwrap(), 2);
    let tc = moment_bruteforce_product(&d, 1.0).unwrap();
    assert!((tc - 1.75).abs() < 1e-12);
    let tq = moment_bruteforce_product(&d, 0.5).unwrap();
    assert!((tq - T_Q_BER25_SQ).abs() < 1e-12, "tq = {tq}");
}

#[test]
fn bruteforce_rejects_large_instances() {
    let d = product(make_uniform(2).unwrap(), 25);
    assert!(matches!(
        moment_bruteforce_product(&d, 1.0),
        Err(Error::InstanceTooLarge { .. })
    ));
    assert!(moment_bruteforce_product(&product(make_uniform(2).unwrap(), 2), 0.0).is_err());
}

#[test]
fn typed_classical_moment_is_exact() {
    let d = product(make_bernoulli(0.25).unwrap(), 2);
    let tbl = RankTable::build(&d).unwrap();
    let report = moment_typed(&tbl, 1.0).unwrap();
    assert_eq!(report.log2_lower, report.log2_upper, "zero-width bracket");
    assert!((report.log2_lower - 1.75f64.log2()).abs() < 1e-12);
    assert!((report.arikan_log2_upper - ARIKAN_UP_BER25_SQ).abs() < 1e-12);
    assert!((report.arikan_log2_lower - ARIKAN_LO_BER25_SQ).abs() < 1e-12);
}

#[test]
fn typed_uniform_mean_rank() {
    let d = product(make_uniform(2).unwrap(), 10);
    let tbl = RankTable::build(&d).unwrap();
    let report = moment_typed(&tbl, 1.0).unwrap();
    // (2^10 + 1)/2 = 512.5
    assert!((report.log2_lower - 512.5f64.log2()).abs() < 1e-12);
}

#[test]
fn typed_rejects_other_rho() {
    let d = product(make_bernoulli(0.25).unwrap(), 2);
    let tbl = RankTable::build(&d).unwrap();
    assert!(matches!(
        moment_typed(&tbl, 2.0),
        Err(Error::UnsupportedRho(_))
    ));
}

#[test]
fn typed_bracket_contains_bruteforce() {
    // instances small enough for both paths; 2^-40 bits of slack covers the
    // two paths' independent f64 rounding
    let slack = 2f64.powi(-40);
    let instances = [
        (make_bernoulli(0.25).unwrap(), 12u32),
        (make_bernoulli(0.5).unwrap(), 8),
        (make_ternary(0.375).unwrap(), 8),
        (make_geometric(9, 0.35).unwrap(), 5),
        (make_discrete_gaussian(3, 1.0).unwrap(), 4),
    ];
    for (atom, n) in instances {
        let d = product(atom, n);
        let tbl = RankTable::build(&d).unwrap();
        for rho in [1.0, 0.5] {
            let bf = moment_bruteforce_product(&d, rho).unwrap().log2();
            let report = moment_typed(&tbl, rho).unwrap();
            assert!(
                report.log2_lower - slack <= bf && bf <= report.log2_upper + slack,
                "rho={rho} n={n}: bf={bf} bracket=[{}, {}]",
                report.log2_lower,
                report.log2_upper
            );
            // the bracket and the entropy sandwich both contain the truth
            assert!(report.log2_lower <= report.arikan_log2_upper + slack);
            assert!(report.arikan_log2_lower <= report.log2_upper + slack);
        }
    }
}

#[test]
fn typed_quantum_bracket_is_tight_at_scale() {
    let d = product(make_bernoulli(0.2).unwrap(), 64);
    let tbl = RankTable::build(&d).unwrap();
    let report = moment_typed(&tbl, 0.5).unwrap();
    assert!(
        report.bracket_width_bits() <= 1e-3,
        "width = {} bits",
        report.bracket_width_bits()
    );
    // sandwich: bracket within [arikan_lower, arikan_upper]
    assert!(report.arikan_log2_lower <= report.log2_lower);
    assert!(report.log2_upper <= report.arikan_log2_upper);
}

#[test]
fn cauchy_schwarz_between_the_moments() {
    for (atom, n) in [
        (make_bernoulli(0.1).unwrap(), 10u32),
        (make_ternary(0.375).unwrap(), 7),
        (make_binomial(4).unwrap(), 5),
    ] {
        let d = product(atom, n);
        let tq = moment_bruteforce_product(&d, 0.5).unwrap();
        let tc = moment_bruteforce_product(&d, 1.0).unwrap();
        assert!(tq <= tc.sqrt() * (1.0 + 1e-12), "n={n}: {tq} vs sqrt {tc}");
    }
}

#[test]
fn arikan_exponent_is_one_over_one_plus_rho() {
    // ρ = 1 keys off H_1/2, ρ = 1/2 off H_2/3
    let d = product(make_bernoulli(0.1).unwrap(), 4);
    let (_, up1) = arikan_bounds(&d, 1.0).unwrap();
    assert!((up1 - 4.0 * 0.6780719051126377).abs() < 1e-12);
    let (_, up_half) = arikan_bounds(&d, 0.5).unwrap();
    assert!((up_half - 0.5 * 4.0 * 0.5959094805604673).abs() < 1e-12);
    // lower = upper − ρ·log2(1 + log2|K|)
    let (lo1, _) = arikan_bounds(&d, 1.0).unwrap();
    assert!((lo1 - (up1 - 5f64.log2())).abs() < 1e-12);
}

#[test]
fn arikan_sandwich_on_the_worked_example() {
    let d = product(make_bernoulli(0.25).unwrap(), 2);
    let (lo, up) = arikan_bounds(&d, 1.0).unwrap();
    let tc_bits = 1.75f64.log2();
    assert!(lo <= tc_bits && tc_bits <= up);
    assert!((up - ARIKAN_UP_BER25_SQ).abs() < 1e-12);
    assert!((lo - ARIKAN_LO_BER25_SQ).abs() < 1e-12);
}

#[test]
fn speedup_uniform_is_exactly_quadratic() {
    let d = make_uniform(16).unwrap();
    let report = speedup(&d).unwrap();
    assert!((report.s_asymptotic - 2.0).abs() < 2f64.powi(-30));
}

#[test]
fn speedup_matches_frozen_values() {
    // (distribution, s_asymptotic) from the 40-digit oracle
    let cases: Vec<(crate::dist::AtomDistribution, f64)> = vec![
        (make_bernoulli(0.1).unwrap(), 2.2757547152124332),
        (make_binomial(4).unwrap(), 2.0441093774360935),
        (make_binomial(6).unwrap(), 2.0577101473817799),
        (make_ternary(0.375).unwrap(), 2.0609423707842396),
        (make_ternary(0.1).unwrap(), 2.3996345644904703),
        (make_discrete_gaussian(100, 1.0).unwrap(), 2.1112533703285808),
    ];
    for (d, want) in cases {
        let got = speedup(&d).unwrap().s_asymptotic;
        assert!((got - want).abs() < 1e-10, "got {got}, want {want}");
    }
}

#[test]
fn speedup_zipf_closed_form() {
    let z = ZipfLaw::new(160_000_000, 0.777).unwrap();
    let got = speedup(&z).unwrap().s_asymptotic;
    assert!((got - 2.0311545766320519).abs() < 1e-7, "got {got}");
    // the closed form matches a materialized instance at smaller n
    let small = ZipfLaw::new(100_000, 0.777).unwrap();
    let mat = make_zipf(100_000, 0.777).unwrap();
    let a = speedup(&small).unwrap().s_asymptotic;
    let b = speedup(&mat).unwrap().s_asymptotic;
    assert!((a - b).abs() < 1e-9);
}

#[test]
fn speedup_nonuniform_exceeds_two() {
    for d in [
        make_bernoulli(0.3).unwrap(),
        make_ternary(0.5).unwrap(),
        make_geometric(1000, 0.1).unwrap(),
        make_poisson_helper(),
    ] {
        let s = speedup(&d).unwrap().s_asymptotic;
        assert!(s > 2.0 + 2f64.powi(-20), "s = {s}");
    }
}

fn make_poisson_helper() -> crate::dist::AtomDistribution {
    crate::dist::make_poisson(1000, 1.0).unwrap()
}

#[test]
fn speedup_finite_bound_can_go_negative_for_tiny_keyspaces() {
    // |K| = 2: log2(1 + 1) = 1 > H_1/2(Ber(0.25)) ≈ 0.9, so the finite
    // bound is negative and reported as-is.
    let d = product(make_bernoulli(0.25).unwrap(), 1);
    let report = speedup(&d).unwrap();
    assert!(report.s_lower < 0.0);
    assert!(report.s_asymptotic > 2.0);
}

#[test]
fn speedup_rejects_degenerate_distributions() {
    let d = make_uniform(1).unwrap();
    assert!(matches!(
        speedup(&d),
        Err(Error::DegenerateDistribution)
    ));
}

#[test]
fn lpn_bound_values() {
    assert!((lpn_small_noise_bound(1e-4).unwrap() - 1.5471962778709).abs() < 1e-10);
    assert!((lpn_small_noise_bound(0.5).unwrap() - 0.37415401610312).abs() < 1e-10);
    assert!(lpn_small_noise_bound(0.0).is_err());
    assert!(lpn_small_noise_bound(0.6).is_err());
}

#[test]
fn lpn_bound_is_below_the_actual_speedup() {
    for p in [1e-1, 1e-2, 1e-3] {
        let s = speedup(&make_bernoulli(p).unwrap()).unwrap().s_asymptotic;
        let bound = lpn_small_noise_bound(p).unwrap();
        assert!(s >= bound, "p={p}: s={s}, bound={bound}");
    }
}

#[test]
fn montanaro_constant() {
    // log2(e·π) = log2(8.53973...)
    assert!((montanaro_factor_log2() - 8.539734222673566f64.log2()).abs() < 1e-15);
}
