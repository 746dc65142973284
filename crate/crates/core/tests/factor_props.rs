mod common;

use num_traits::{Signed, Zero};
use oblivious_kand::certificates::{constants, dual_certificate, solve_core_strict};
use oblivious_kand::factor_lp::{
    approximation_ratio, instance_from_solution, instance_ratio, nice_solution, snapshot_weights, superoblivious_hard_solution,
    synthesized_var, FeasibleWeights, DEFAULT_CLAUSE_CAP,
};
use oblivious_kand::instance::Assignment;
use oblivious_kand::oblivious::{pattern_of_clause, Pattern, PatternSpace};
use oblivious_kand::rational::{int, powi, ratio, to_f64};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ratio_never_beats_the_trivial_bound(k in 2usize..=5, tp in common::params(2)) {
        let (t, p) = tp;
        let r = approximation_ratio(k, &t, &p).unwrap().ratio;
        prop_assert!(r <= 0.5f64.powi(k as i32 - 1) + 1e-9);
    }

    #[test]
    fn symmetric_witness_is_feasible(k in 2usize..=6, tp in common::params(3)) {
        let (t, p) = tp;
        let ell = t.ell();
        let w = FeasibleWeights::new(
            k,
            ell,
            [(Pattern::concentrated(ell, k, 0, true), int(1)), (Pattern::concentrated(ell, k, 0, false), int(1))],
        )
        .unwrap();
        prop_assert!(w.is_feasible(&t));
        prop_assert_eq!(w.objective(&p), int(2) * powi(&ratio(1, 2), k as i64));
    }

    /// LP optimum → nice solution → synthesized instance, then back.
    #[test]
    fn synthesis_round_trip(tp in common::params(1)) {
        let (t, p) = tp;
        let k = 2;
        let lp = approximation_ratio(k, &t, &p).unwrap();
        let eps = 1e-6;
        let nice = nice_solution(&lp.weights, &t, eps).unwrap();
        prop_assert!(nice.is_nice(&t));
        let inst = instance_from_solution(&nice, &t, DEFAULT_CLAUSE_CAP).unwrap();

        // Every clause recovers its source pattern.
        for j in 0..inst.m() {
            let c = pattern_of_clause(&inst, &t, j).unwrap();
            prop_assert!(!nice.get(&c).is_zero());
        }
        // Counting identity: copy a of class i sees W⁺(i)/k and W⁻(i)/k.
        let lw = inst.literal_weights();
        let kq = int(k as i64);
        for i in -(t.ell() as isize)..=t.ell() as isize {
            for a in 1..=k {
                let v = synthesized_var(t.ell(), k, i, a);
                prop_assert_eq!(&lw[v - 1].0, &(nice.w_plus(i) / &kq));
                prop_assert_eq!(&lw[v - 1].1, &(nice.w_minus(i) / &kq));
            }
        }
        // The all-ones assignment has value 1/M, and the snapshot at that
        // value is the nice solution itself.
        let ones = inst.assignment_value(&Assignment::all_positive(inst.n()));
        prop_assert_eq!(snapshot_weights(&inst, &t, &ones).unwrap(), nice.clone());
        // Obl/val is at most the objective of W.
        let obl_over_val = to_f64(&instance_ratio(&inst, &t, &p).unwrap());
        prop_assert!(obl_over_val <= to_f64(&nice.objective(&p)) + 1e-12);
        // The niceness perturbation is small.
        let space = PatternSpace::new(k, t.ell()).unwrap();
        let drift: f64 = space.patterns().iter().map(|c| to_f64(&(nice.get(c) - lp.weights.get(c)).abs())).sum();
        prop_assert!(drift <= 100.0 * eps, "drift {}", drift);
    }

    #[test]
    fn certificate_is_homogeneous_in_beta(k in 2usize..=8, num in 1i64..=100) {
        let c = constants(k).unwrap();
        let s = ratio(num, 100);
        let base = dual_certificate(k, &int(0), &c.gamma, &c.beta, &int(2), &int(1)).unwrap();
        let scaled = dual_certificate(k, &int(0), &c.gamma, &(&c.beta * &s), &int(2), &int(1)).unwrap();
        prop_assert!(base.exact_feasible && scaled.exact_feasible);
        prop_assert_eq!(scaled.certified_ratio(), &(base.certified_ratio() * &s));
        prop_assert_eq!(&scaled.y_plus_neg, &(&base.y_plus_neg * &s));
        // Past β_k the point leaves the polytope.
        let over = dual_certificate(k, &int(0), &c.gamma, &(&c.beta * ratio(101, 100)), &int(2), &int(1)).unwrap();
        prop_assert!(!over.exact_feasible);
    }
}

#[test]
fn hard_solutions_attain_alpha_star() {
    for k in 2..=12 {
        let c = constants(k).unwrap();
        let t = oblivious_kand::oblivious::BiasPartition::superoblivious();
        let w = superoblivious_hard_solution(k).unwrap();
        assert!(w.is_feasible(&t), "k={k}");
        let p = oblivious_kand::oblivious::RoundingVector::single(c.p_star.clone()).unwrap();
        assert_eq!(w.objective(&p), c.alpha_star, "k={k}");
    }
}

#[test]
fn core_strict_beats_alpha_star() {
    for k in 2..=8 {
        let sol = solve_core_strict(k, &ratio(1, 100)).unwrap();
        let c = constants(k).unwrap();
        assert!(sol.certified_lower_bound > c.alpha_star, "k={k}");
        assert!(sol.core_slacks.iter().all(|s| s.is_positive()));
        let r = approximation_ratio(k, &sol.partition().unwrap(), &sol.rounding().unwrap()).unwrap().ratio;
        assert!(r >= to_f64(&sol.certified_lower_bound) - 1e-9, "k={k}: LP {r} below certificate");
        assert!(r > to_f64(&c.alpha_star), "k={k}");
    }
}
