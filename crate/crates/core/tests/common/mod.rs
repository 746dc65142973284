#![allow(dead_code)]

use oblivious_kand::instance::{Clause, Instance};
use oblivious_kand::oblivious::{BiasPartition, RoundingVector};
use oblivious_kand::rational::{int, ratio};
use oblivious_kand::Rational;
use proptest::prelude::*;

/// Raw clause: `k` distinct variable ids, a sign per literal, a weight.
type RawClause = (Vec<usize>, Vec<bool>, (i64, i64));

fn raw_clause(k: usize, n: usize, weighted: bool) -> impl Strategy<Value = RawClause> {
    let w = if weighted { (1i64..=6, 1i64..=3).boxed() } else { Just((1i64, 1i64)).boxed() };
    (proptest::sample::subsequence((1..=n).collect::<Vec<_>>(), k), proptest::collection::vec(any::<bool>(), k), w)
}

/// Relabels the used variables to `1..=n'` so no variable is isolated.
fn assemble(k: usize, raw: Vec<RawClause>) -> Instance {
    let mut used: Vec<usize> = raw.iter().flat_map(|c| c.0.iter().copied()).collect();
    used.sort_unstable();
    used.dedup();
    let id = |v: usize| used.binary_search(&v).unwrap() + 1;
    let clauses = raw
        .into_iter()
        .map(|(vars, signs, (a, b))| {
            let (mut pos, mut neg) = (Vec::new(), Vec::new());
            for (v, s) in vars.into_iter().zip(signs) {
                if s { pos.push(id(v)) } else { neg.push(id(v)) }
            }
            Clause::new(pos, neg, ratio(a, b)).unwrap()
        })
        .collect();
    Instance::new(k, used.len(), clauses).unwrap()
}

/// Weighted instances with `k` in `2..=max_k`, at most `max_n` variables
/// and between 1 and `max_m` clauses.
pub fn instance(max_k: usize, max_n: usize, max_m: usize, weighted: bool) -> impl Strategy<Value = Instance> {
    (2..=max_k)
        .prop_flat_map(move |k| (Just(k), k..=max_n))
        .prop_flat_map(move |(k, n)| (Just(k), proptest::collection::vec(raw_clause(k, n, weighted), 1..=max_m)))
        .prop_map(|(k, raw)| assemble(k, raw))
}

/// Bias partition with `ell` classes on a 1/100 grid.
pub fn partition(ell: usize) -> impl Strategy<Value = BiasPartition> {
    proptest::sample::subsequence((0..100i64).collect::<Vec<_>>(), ell).prop_map(|cuts| {
        let mut t: Vec<Rational> = cuts.into_iter().map(|c| ratio(c, 100)).collect();
        t.push(int(1));
        BiasPartition::new(t).unwrap()
    })
}

pub fn rounding(ell: usize) -> impl Strategy<Value = RoundingVector> {
    proptest::collection::vec(0i64..=100, ell).prop_map(|p| RoundingVector::new(p.into_iter().map(|x| ratio(x, 100)).collect()).unwrap())
}

/// `(t, p)` with `ℓ` in `1..=max_ell`.
pub fn params(max_ell: usize) -> impl Strategy<Value = (BiasPartition, RoundingVector)> {
    (1..=max_ell).prop_flat_map(|ell| (partition(ell), rounding(ell)))
}
