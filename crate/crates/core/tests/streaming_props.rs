mod common;

use oblivious_kand::factor_lp::approximation_ratio;
use oblivious_kand::oblivious::{oblivious_value, PatternSpace};
use oblivious_kand::rational::to_f64;
use oblivious_kand::streaming::{
    bounded_degree_estimate, generate_random_instance, max_degree, random_order_estimate, shuffle_stream, snapshot_l1_error,
    BiasProfile, ClauseStream,
};
use proptest::prelude::*;

fn profile() -> impl Strategy<Value = BiasProfile> {
    prop_oneof![Just(BiasProfile::Uniform), (0.0..1.0f64).prop_map(BiasProfile::Skewed), (0.5..1.0f64).prop_map(BiasProfile::Planted)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Whenever the measured snapshot error is at most `E`, the corrected
    /// estimate lies in `[(α - 2^{k+1} E) val, val]`.
    #[test]
    fn estimator_sandwich(
        k in 2usize..=3,
        n in 6usize..=12,
        m in 12usize..=40,
        prof in profile(),
        tp in common::params(1),
        eps in 0.05..0.6f64,
        seed in any::<u64>(),
    ) {
        let (t, p) = tp;
        let inst = generate_random_instance(k, n, m, prof, None, seed).unwrap();
        let stream = shuffle_stream(&inst, seed ^ 1).unwrap();
        let out = random_order_estimate(&stream, &t, &p, eps, 1.0).unwrap();
        let l1 = snapshot_l1_error(&stream, &t, &out.mhat).unwrap();
        let e = eps * PatternSpace::new(k, t.ell()).unwrap().len() as f64;
        if l1 <= e {
            let val = to_f64(&inst.brute_force_optimum().unwrap().1);
            let alpha = approximation_ratio(k, &t, &p).unwrap().ratio;
            prop_assert!(out.estimate <= val + 1e-12);
            prop_assert!(out.estimate >= (alpha - 2f64.powi(k as i32 + 1) * e) * val - 1e-12);
        }
        // The exact path reproduces the oblivious value.
        if out.exact {
            let obl = to_f64(&oblivious_value(&inst, &t, &p).unwrap());
            prop_assert!((out.linear - obl).abs() < 1e-12);
        }
    }

    #[test]
    fn random_order_space_is_bounded(k in 2usize..=3, m in 20usize..=400, eps in 0.1..1.0f64, c in 1.0..8.0f64, seed in any::<u64>()) {
        let inst = generate_random_instance(k, 20, m, BiasProfile::Uniform, None, seed).unwrap();
        let (t, p) = (oblivious_kand::oblivious::BiasPartition::superoblivious(), oblivious_kand::oblivious::RoundingVector::single(oblivious_kand::rational::ratio(2, 3)).unwrap());
        let out = random_order_estimate(&shuffle_stream(&inst, seed).unwrap(), &t, &p, eps, c).unwrap();
        let cap = (c / (eps * eps)).ceil() as usize;
        prop_assert!(out.stored_clauses <= cap.min(m));
        prop_assert!(out.tracked_vars <= k * out.stored_clauses);
    }

    #[test]
    fn estimators_are_deterministic_per_seed(seed in any::<u64>(), prof in profile()) {
        let inst = generate_random_instance(2, 200, 400, prof, Some(6), seed).unwrap();
        prop_assert!(max_degree(&inst) <= 6);
        let (t, p) = (oblivious_kand::oblivious::BiasPartition::superoblivious(), oblivious_kand::oblivious::RoundingVector::single(oblivious_kand::rational::ratio(2, 3)).unwrap());
        let stream = ClauseStream::from_instance(&inst).unwrap();
        let a = bounded_degree_estimate(&stream, 6, 400, &t, &p, 0.5, 4.0, seed).unwrap();
        let b = bounded_degree_estimate(&stream, 6, 400, &t, &p, 0.5, 4.0, seed).unwrap();
        prop_assert_eq!(&a, &b);
        let s1 = shuffle_stream(&inst, seed).unwrap();
        prop_assert_eq!(random_order_estimate(&s1, &t, &p, 0.3, 2.0).unwrap(), random_order_estimate(&shuffle_stream(&inst, seed).unwrap(), &t, &p, 0.3, 2.0).unwrap());
    }

    #[test]
    fn generator_respects_cap_and_coverage(k in 2usize..=4, n in 4usize..=60, extra in 0usize..=100, cap in 2usize..=10, seed in any::<u64>()) {
        prop_assume!(n >= k);
        let m = (n.div_ceil(k) + extra).min(n * cap / k);
        prop_assume!(m * k >= n && m > 0);
        let inst = generate_random_instance(k, n, m, BiasProfile::Uniform, Some(cap), seed).unwrap();
        prop_assert_eq!(inst.m(), m);
        prop_assert!(max_degree(&inst) <= cap);
        // Round-trips through the parser, which rejects isolated variables.
        prop_assert!(oblivious_kand::instance::Instance::parse(&inst.to_text()).is_ok());
    }
}
