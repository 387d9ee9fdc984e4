//! Property checks against the public API.

use std::collections::BTreeMap;

use num_rational::{BigRational, Rational64};
use num_traits::Signed;
use proptest::prelude::*;

use mgshift::analytics::poly::entropy_polys_upto;
use mgshift::analytics::{
    a_closed, a_series, derivative_series_at_p, dim_minkowski, gauge_log2, hausdorff_dim, s_f64, solve_p, Gauge,
    MonotoneFn,
};
use mgshift::golden::{
    chain_length, chain_partition, interleave_chains, is_golden_word, is_multiplicative_prefix, odd_indices_in,
    restrict_to_chain, ChainIndex,
};
use mgshift::measures::{pmu_identity_gap, prefix_logprob, sample_point, BlockAssignment, MeasureSpec};
use mgshift::BinaryWord;

fn word(bits: &[bool]) -> BinaryWord {
    BinaryWord::from_bits(bits.iter().copied())
}

fn measure() -> impl Strategy<Value = MeasureSpec> {
    prop_oneof![
        Just(MeasureSpec::Pmu),
        (0.0..0.4f64).prop_map(|d| MeasureSpec::pdelta(d).unwrap())
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn chains_partition_the_prefix(n in 1u64..1_000_000) {
        let total: u64 = (1..=n)
            .step_by(2)
            .map(|i| chain_length(n, ChainIndex::new(i).unwrap()).unwrap() as u64)
            .sum();
        prop_assert_eq!(total, n);
        let by_map: u64 = chain_partition(n.min(5000)).values().map(|&l| l as u64).sum();
        prop_assert_eq!(by_map, n.min(5000));
    }

    #[test]
    fn restriction_and_interleave_round_trip(bits in prop::collection::vec(any::<bool>(), 1..200)) {
        let u = word(&bits);
        let n = u.len();
        let mut chains = BTreeMap::new();
        let mut all_golden = true;
        for i in (1..=n as u64).step_by(2) {
            let idx = ChainIndex::new(i).unwrap();
            let r = restrict_to_chain(&u, idx).unwrap();
            all_golden &= is_golden_word(&r);
            chains.insert(idx, r);
        }
        prop_assert_eq!(interleave_chains(n, &chains).unwrap(), u.clone());
        prop_assert_eq!(all_golden, is_multiplicative_prefix(&u));
    }

    #[test]
    fn odd_index_counts_track_interval_length(a in -10_000i64..10_000, da in 1i64..50, b in -10_000i64..10_000, db in 1i64..50) {
        let (x, y) = (Rational64::new(a, da), Rational64::new(b, db));
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        if let Ok(ix) = odd_indices_in(lo, hi) {
            let half = (hi - lo) / 2;
            let diff = Rational64::from_integer(ix.len() as i64) - half;
            prop_assert!(diff.abs() <= Rational64::from_integer(1));
        }
    }

    #[test]
    fn support_is_the_admissible_set(bits in prop::collection::vec(any::<bool>(), 1..300), d in 0.0..0.4f64) {
        let u = word(&bits);
        let admissible = is_multiplicative_prefix(&u);
        for assign in [BlockAssignment::uniform(), BlockAssignment::harmonic(d).unwrap()] {
            prop_assert_eq!(!prefix_logprob(&assign, &u).is_zero(), admissible);
        }
    }

    #[test]
    fn samples_are_admissible_and_extend(m in measure(), seed in any::<u64>(), n in 1usize..3000, extra in 0usize..3000) {
        let short = sample_point(&m, n, seed).unwrap().word;
        let long = sample_point(&m, n + extra, seed).unwrap().word;
        prop_assert!(is_multiplicative_prefix(&long));
        prop_assert_eq!(long.prefix(n), short.clone());
        let zeros_by_chain: usize = (1..=n as u64)
            .step_by(2)
            .map(|i| restrict_to_chain(&short, ChainIndex::new(i).unwrap()).unwrap().count_zeros())
            .sum();
        prop_assert_eq!(zeros_by_chain, short.count_zeros());
        let even = short.prefix(n - n % 2);
        if !even.is_empty() {
            prop_assert!(pmu_identity_gap(&even).unwrap().abs() <= 1e-8);
        }
    }

    #[test]
    fn series_closed_form_within_tail(i in 1u32..100) {
        let r = i as f64 / 100.0;
        let closed = a_closed(r).unwrap();
        let series = a_series(r, 60).unwrap();
        prop_assert!((series.value - closed).abs() <= series.tail_bound + 1e-12);
    }

    #[test]
    fn gauges_decrease_and_order(n in 64u64..1 << 40, theta in 0.01..1.99f64, c in 0.001..0.99f64) {
        let s = s_f64();
        let pure = Gauge::PureS { s };
        let phi = Gauge::Phi { s, c };
        let psi = Gauge::PsiTheta { s, theta };
        let g = Gauge::PsiG { s, g: MonotoneFn::power(1.5) };
        for gauge in [&pure, &phi, &psi, &g] {
            prop_assert!(gauge_log2(gauge, n + 1).unwrap() < gauge_log2(gauge, n).unwrap());
        }
        if n >= 1 << 20 {
            prop_assert!(gauge_log2(&psi, n).unwrap() <= gauge_log2(&phi, n).unwrap());
            prop_assert!(gauge_log2(&phi, n).unwrap() <= gauge_log2(&pure, n).unwrap());
        }
    }
}

#[test]
fn entropy_polynomial_telescoping() {
    let f = entropy_polys_upto(30);
    let one = mgshift::analytics::poly::Poly::constant(1);
    let one_minus_x = mgshift::analytics::poly::Poly::from_ints(&[1, -1]);
    for k in 2..=30 {
        let lhs = f[k].poly() - f[k - 1].poly();
        let rhs = &one - &(&one_minus_x * &(f[k - 1].poly() - f[k - 2].poly()));
        assert_eq!(lhs, rhs, "k = {k}");
    }
}

#[test]
fn certified_chain_of_constants() {
    let p = solve_p();
    let s = hausdorff_dim();
    let dm = dim_minkowski(1e-9).unwrap().enclosure.unwrap();
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    assert!(p.lo() > &q(1, 2) && p.hi() < &q(6, 10));
    assert!(s.lo() > &q(81, 100) && s.hi() < &q(82, 100));
    assert!(dm.lo() > &q(824, 1000) && dm.hi() < &q(825, 1000));
    assert!(s.certainly_lt(&dm));
}

#[test]
fn derivative_series_contains_zero_from_twelve_terms() {
    for k in [12, 16, 24, 40, 64] {
        assert!(derivative_series_at_p(k).unwrap().contains_zero(), "K = {k}");
    }
}
